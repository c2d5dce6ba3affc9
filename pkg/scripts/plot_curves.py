#=========================================================================
# plot_curves.py
#=========================================================================
# Draws regularized QFI curves written by `depol-entanglement curve`.
#
#   python scripts/plot_curves.py curve_mu1_0.5.csv curve_mu1_1.csv -o curves.pdf
#
# The same picture in gnuplot:
#   set datafile separator ','
#   plot for [f in system('ls curve_*.csv')] f using 1:3 skip 1 with lines title f

import argparse
import math
import os.path

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import pandas as pd

fig_width_pt  = 244.0
inches_per_pt = 1.0/72.27
aspect_ratio  = ( math.sqrt(5) - 1.0 ) / 2.0

fig_width     = fig_width_pt * inches_per_pt
fig_size      = [ fig_width, fig_width * aspect_ratio ]

plt.rcParams['font.size']      = 9
plt.rcParams['font.family']    = 'serif'
plt.rcParams['figure.figsize'] = fig_size


def main():
    parser = argparse.ArgumentParser(description="Plot eps * J(rho_eps) against eps")
    parser.add_argument("csv", nargs="+")
    parser.add_argument("-o", "--output", default="curves.pdf")
    parser.add_argument("--column", default="regularized_qfi", choices=["qfi", "regularized_qfi"])
    parser.add_argument("--logx", action="store_true")
    args = parser.parse_args()

    fig = plt.figure()
    ax = fig.add_subplot(1, 1, 1)
    for path in args.csv:
        frame = pd.read_csv(path)
        label = os.path.splitext(os.path.basename(path))[0]
        ax.plot(frame["epsilon"], frame[args.column], linewidth=1.0, label=label)

    ax.set_xlabel(r'$\epsilon$')
    ax.set_ylabel(r'$\epsilon J(\rho_\epsilon)$' if args.column == "regularized_qfi" else r'$J(\rho_\epsilon)$')
    if args.logx:
        ax.set_xscale('log')

    # Turn off top and right border
    ax.spines['right'].set_visible(False)
    ax.spines['top'].set_visible(False)
    ax.legend(frameon=False, fontsize=7)

    fig.savefig(args.output, bbox_inches='tight')


if __name__ == "__main__":
    main()
