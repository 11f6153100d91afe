#!/usr/bin/env python3
"""Check tr((|0><0| + 1/2 |1><1|) |psi0><psi1|) = 0 on the generated
hiding preparations.

Usage: check_hiding_orthogonality.py DIR
where DIR holds the output of `qopdist examples`.
"""

import json
import sys
from pathlib import Path

TOL = 1e-12


def prepared_state(path):
    data = json.loads(Path(path).read_text())
    first = data["kraus"][0]
    return [complex(row[0][0], row[0][1]) for row in first]


def main():
    if len(sys.argv) != 2:
        print(__doc__.strip(), file=sys.stderr)
        return 1
    out = Path(sys.argv[1])
    psi0 = prepared_state(out / "hiding_prepare_0.json")
    psi1 = prepared_state(out / "hiding_prepare_1.json")
    weights = [1.0, 0.5]
    value = sum(w * a * b.conjugate() for w, a, b in zip(weights, psi0, psi1))
    ok = abs(value) <= TOL
    print(f"{'PASS' if ok else 'FAIL'} residual {abs(value):.3e}")
    return 0 if ok else 3


if __name__ == "__main__":
    sys.exit(main())
