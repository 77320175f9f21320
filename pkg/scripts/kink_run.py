"""Traveling kink at c = 0.4: desk scale by default, --long for T = 100."""

import argparse
import json

from dimerdg.experiments import kink_config, run_kink


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/kink")
    ap.add_argument("--long", action="store_true")
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--tfinal", type=float)
    args = ap.parse_args()
    cfg = kink_config(long=args.long, out=args.out, q=args.q, t_final=args.tfinal)
    res = run_kink(cfg)
    summary = json.loads((res.files[-1]).read_text())["results"]
    print(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
