"""Monte Carlo family-wise error of the Rom procedure under the global null."""
import argparse

from labelspace.stats import rom_familywise_error


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--datasets", type=int, default=12)
    ap.add_argument("--methods", type=int, default=13)
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    fwer = rom_familywise_error(args.datasets, args.methods, args.trials, args.alpha, args.seed)
    print(f"N={args.datasets} k={args.methods} trials={args.trials}: FWER {fwer:.5f} (alpha {args.alpha})")


if __name__ == "__main__":
    main()
