"""Built-in sweep configurations that regenerate the published figure data."""
from __future__ import annotations

import copy

__all__ = ["PRESETS", "get_preset"]


def _local(omega_p, omega_k, g_k, label):
    return {"label": label, "model": "asymmetric-local",
            "params": {"omega_p": omega_p, "omega_k": list(omega_k), "g_k": list(g_k)}}


def _global(omega_p, omega_k, g_k, label):
    return {"label": label, "model": "global-gibbs",
            "params": {"omega_p": omega_p, "omega_k": list(omega_k), "g_k": list(g_k)}}


PRESETS: dict[str, dict] = {
    "fig2": {
        "figure": "Fig. 2",
        "kind": "sweep",
        "t_min": 1e-3, "t_max": 3.0, "n_points": 400, "grid": "log",
        "curves": [_local(1.0, [0.04], [g], f"g1={g}") for g in (0.01, 0.02, 0.03, 0.04)],
        "notes": "one ancilla, omega_p=1, omega_1=0.04",
    },
    "fig3": {
        "figure": "Fig. 3",
        "kind": "sweep",
        "t_min": 1e-3, "t_max": 3.0, "n_points": 400, "grid": "log",
        "curves": [_local(1.0, [0.04], [0.01], "exact")],
        "approximation": "weak-coupling-n1",
        "notes": "exact curve; the weak-coupling approximation is written to a separate <stem>_approx.csv",
    },
    "fig4": {
        "figure": "Fig. 4",
        "kind": "sweep",
        "t_min": 1e-3, "t_max": 3.0, "n_points": 400, "grid": "log",
        "curves": [_local(wp, [0.09, 0.17], [0.003, 0.05], f"omega_p={wp}") for wp in (0.26, 0.3, 0.4)],
        "notes": "two ancillas; probe gap taken as the literal sum of the two sector roots",
    },
    "fig5": {
        "figure": "Fig. 5",
        "kind": "sweep+scaling",
        "t_min": 1e-3, "t_max": 10.0, "n_points": 400, "grid": "log",
        "curves": [_global(1.0, [0.02], [0.02], "panel-a")]
        + [_global(1.0, [0.03] * n, [0.01] * n, f"N={n}") for n in range(1, 11)],
        "scaling": {"omega_p": 1.0, "omega": 0.03, "g": 0.01, "n_max": 10},
        "notes": "all qubits thermalized with the sample; identical ancillas for panels b-d",
    },
    "fig6": {
        "figure": "Fig. 6",
        "kind": "sweep",
        "t_min": 1e-3, "t_max": 10.0, "n_points": 400, "grid": "log",
        "curves": [
            _global(1.0, [0.09, 0.2, 0.5], [0.003, 0.15, 0.008], "g2=0.15"),
            _global(1.0, [0.09, 0.2, 0.5], [0.003, 0.2, 0.008], "g2=0.2"),
            _global(1.0, [0.09, 0.2, 0.5], [0.003, 0.3, 0.008], "g2=0.3"),
            _global(1.0, [0.85, 0.2, 0.5], [0.003, 0.3, 0.008], "g2=0.3,omega1=0.85"),
        ],
        "ambiguity": (
            "caption lists g2=0.3 twice and gives omega1 both as 0.09 and 0.85; "
            "the fourth curve is read as g2=0.3 with omega1=0.85. 'N=4' is read as "
            "four qubits in total, i.e. three ancillas plus the probe"
        ),
        "notes": "non-identical ancillas, all thermalized with the sample",
    },
}


def get_preset(name: str) -> dict:
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
