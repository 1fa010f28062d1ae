"""Total and colliding scenario counts for the bundled lane-change families."""

from cpd.analyze import collision_pairs, detect_collisions
from cpd.enumeration import enumerate_scenarios
from cpd.models import FAMILIES, load_builtin


def main() -> None:
    print(f"{'model':<18} {'cars':>4} {'boxes':>5} {'trans':>5} {'total':>6} {'col':>6}")
    for names in FAMILIES.values():
        for name in names:
            m = load_builtin(name)
            r = enumerate_scenarios(m)
            col = detect_collisions(r.scenarios, collision_pairs(m)).colliding
            print(f"{name:<18} {len(m.cars):>4} {len(m.box_ids):>5} {len(m.transitions):>5} "
                  f"{r.count:>6} {col:>6}")


if __name__ == "__main__":
    main()
