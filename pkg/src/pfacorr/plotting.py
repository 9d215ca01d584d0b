"""PNG rendering of curves written by the CLI (matplotlib, Agg backend)."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["plot_curves"]

_COLORS = {"D": "tab:blue", "N": "tab:red", "EM": "tab:green"}


def plot_curves(path, series, xlabel="d/R", ylabel="E/E_PFA", title=None, xlim=None, ylim=None):
    """Draw several curves into one PNG.

    Parameters
    ----------
    path : str or Path
    series : list of dict
        each with ``x``, ``y``, ``label`` and optional ``style`` (``"line"``,
        ``"dashed"`` or ``"points"``), ``group`` (picks a color) and ``yerr``
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.5), dpi=120)
    for s in series:
        color = _COLORS.get(s.get("group"), None)
        style = s.get("style", "line")
        if style == "points":
            ax.errorbar(s["x"], s["y"], yerr=s.get("yerr"), fmt="o", ms=4, color=color,
                        label=s["label"])
        else:
            ax.plot(s["x"], s["y"], "--" if style == "dashed" else "-", color=color, lw=1.4,
                    label=s["label"])
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if xlim:
        ax.set_xlim(*xlim)
    if ylim:
        ax.set_ylim(*ylim)
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    # fixed metadata keeps reruns byte-identical
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path
