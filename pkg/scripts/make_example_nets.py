"""Write the reference nets to data/ in the JSON net format."""

from __future__ import annotations

import argparse
from pathlib import Path

from qembed.library import chain_net, lung_net, scattering_net, voting_net
from qembed.netcore import save_net


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "data")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    nets = {
        "lung": lung_net(),
        "scattering": scattering_net(2),
        "chain": chain_net(3),
        "voting": voting_net([0.9, 0.2, 0.7, 0.05]),
    }
    for name, net in nets.items():
        path = args.out / f"{name}.json"
        save_net(net, path)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
