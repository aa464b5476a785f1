"""Recompute likelihood aggregates from the bundled reference table and diff them."""
from pathlib import Path

from labelspace.stats import LikelihoodTable, aggregate_likelihoods, read_aggregates_csv

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    table = LikelihoodTable.from_csv(FIXTURES / "reference_likelihoods.csv")
    expected = read_aggregates_csv(FIXTURES / "reference_aggregates.csv")
    worst = 0.0
    print(f"{'method':22s} {'metric':16s} {'min':>9s} {'median':>9s} {'mean':>9s} {'std':>9s}  max|err|")
    for (method, metric), ref in sorted(expected.items()):
        got = aggregate_likelihoods(table, method, metric)
        err = max(abs(a - b) for a, b in zip(got, ref))
        worst = max(worst, err)
        print(f"{method:22s} {metric:16s} " + " ".join(f"{v:9.6f}" for v in got) + f"  {err:.1e}")
    print(f"worst absolute difference: {worst:.2e}")


if __name__ == "__main__":
    main()
