"""Classify the cusps of the bundled peripheral examples over a range of t."""

import argparse

import numpy as np

from bending.classify import PeripheralData, classify
from bending.examples import load_example


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--examples", nargs="+",
                        default=["whitehead", "whitehead_d4", "separating", "p_prime", "b_prime"])
    parser.add_argument("--t", type=float, nargs="+", default=list(np.linspace(-1, 1, 5)))
    args = parser.parse_args()
    print(f"{'example':<14}{'cusp':<8}{'t':>6}  {'kind':<15}{'beta':>12}{'affine scale':>14}")
    for name in args.examples:
        doc = load_example(name)
        for raw in doc["cusps"]:
            data = PeripheralData.from_dict(dict(raw, dimension=raw.get("dimension",
                                                                        doc["dimension"])))
            for t in args.t:
                rep = classify(data, t)
                print(f"{name:<14}{data.name:<8}{t:6.2f}  {rep.kind:<15}{rep.beta:12.6g}"
                      f"{rep.affine_scale:14.6g}")


if __name__ == "__main__":
    main()
