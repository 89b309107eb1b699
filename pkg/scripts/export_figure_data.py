"""Write effective-potential profiles for every figure preset to a directory.

Usage: python scripts/export_figure_data.py [outdir] [--plot]
"""

import argparse
from pathlib import Path

from monopole_qes.cli import main as cli_main
from monopole_qes.cli import read_csv_table
from monopole_qes.config import FIGURE_PRESETS


def plot(outdir, names):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for name in names:
        header, rows = read_csv_table((outdir / f"{name}.csv").read_text())
        r = [float(row[0]) for row in rows]
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for col, label in enumerate(header[1:], start=1):
            ax.plot(r, [float(row[col]) for row in rows], label=label[6:-1])
        ax.set_xlabel("r")
        ax.set_ylabel("V_eff")
        ax.legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(outdir / f"{name}.png", dpi=120)
        plt.close(fig)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("outdir", nargs="?", default="figure_data")
    parser.add_argument("--plot", action="store_true", help="also render PNGs (needs matplotlib)")
    args = parser.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name in FIGURE_PRESETS:
        code = cli_main(["potential", "--preset", name, "--output", str(outdir / f"{name}.csv")])
        if code:
            return code
        print(f"wrote {outdir / name}.csv")
    if args.plot:
        plot(outdir, FIGURE_PRESETS)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
