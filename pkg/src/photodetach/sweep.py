"""
Parameter sweeps and deterministic CSV tables (figure datasets).

A sweep varies one quantity (the action u, the photon energy in eV or the
screen radius in bohr) over a linear grid for one or more walls.  Rows are
ordered by swept value, then by wall in the order given, so output depends
only on the sweep description.
"""

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import model as m
from .units import ev_to_hartree, hartree_to_ev

VARIABLES = ("u", "E_ph_eV", "rho_bohr")

#: Quantity -> output column name.
QUANTITY_COLUMNS = {
    "A": "A",
    "sigma0": "sigma0_au",
    "sigma1": "sigma1_au",
    "sigma2": "sigma2_au",
    "sigma_total": "sigma_total_au",
    "j_z": "j_z_au",
}

#: Quantities each swept variable can produce.
ALLOWED = {
    "u": {"A"},
    "E_ph_eV": {"A", "sigma0", "sigma1", "sigma2", "sigma_total"},
    "rho_bohr": {"j_z"},
}


class SweepError(ValueError):
    """Inconsistent sweep description."""


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep and which quantities to tabulate.

    ``photon_ev`` is the fixed photon energy of a ``rho_bohr`` sweep;
    ``geometry`` supplies the screen distance.
    """

    variable: str
    start: float
    stop: float
    count: int
    surfaces: tuple
    outputs: tuple
    ion: m.IonModel = m.IonModel()
    geometry: m.ScreenGeometry = None
    photon_ev: float = None

    def validate(self):
        if self.variable not in VARIABLES:
            raise SweepError(f"variable: must be one of {VARIABLES}, got {self.variable!r}")
        if not self.start < self.stop:
            raise SweepError(f"start/stop: need start < stop, got {self.start} >= {self.stop}")
        if self.count < 2:
            raise SweepError(f"count: need at least 2 points, got {self.count}")
        if not self.surfaces:
            raise SweepError("surfaces: at least one wall is required")
        if not self.outputs:
            raise SweepError("outputs: at least one quantity is required")
        unknown = [q for q in self.outputs if q not in QUANTITY_COLUMNS]
        if unknown:
            raise SweepError(f"outputs: unknown quantities {unknown}")
        bad = [q for q in self.outputs if q not in ALLOWED[self.variable]]
        if bad:
            raise SweepError(
                f"outputs: {bad} cannot be computed in a {self.variable} sweep "
                f"(allowed: {sorted(ALLOWED[self.variable])})"
            )
        if self.variable == "u" and self.start < 0:
            raise SweepError("start: action u must be non-negative")
        if self.variable == "E_ph_eV" and ev_to_hartree(self.start) <= self.ion.binding_energy:
            raise SweepError("start: photon energy must exceed the detachment threshold")
        if self.variable == "rho_bohr":
            if self.geometry is None:
                raise SweepError("geometry: a rho_bohr sweep needs a screen geometry")
            if self.photon_ev is None or ev_to_hartree(self.photon_ev) <= self.ion.binding_energy:
                raise SweepError("photon_ev: a rho_bohr sweep needs a photon energy above threshold")
            if self.start < 0:
                raise SweepError("start: rho must be non-negative")
        return self

    def grid(self):
        return np.linspace(self.start, self.stop, self.count)

    @property
    def columns(self):
        cols = [self.variable, "K", "mu", "d_bohr"]
        if self.variable == "rho_bohr":
            cols += ["E_ph_eV", "L_bohr"]
        if self.variable == "E_ph_eV":
            cols += ["u"]
        return tuple(cols + [QUANTITY_COLUMNS[q] for q in self.outputs])


@dataclass
class Table:
    columns: tuple
    rows: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float).reshape(-1, len(self.columns))

    def column(self, name):
        return self.rows[:, self.columns.index(name)]


def _evaluate(spec, surface, x):
    """Columns for one wall over swept values ``x`` (all but the leading fixed ones)."""
    ion = spec.ion
    n = x.size
    const = [np.full(n, surface.reflection), np.full(n, surface.phase_index), np.full(n, surface.wall_distance)]
    out = {}
    if spec.variable == "u":
        extra = []
        out["A"] = lambda: m.modulation(x, surface)
    elif spec.variable == "E_ph_eV":
        E = ev_to_hartree(x) - ion.binding_energy
        u = m.action(surface, E)
        extra = [u]
        out.update(
            A=lambda: m.modulation(u, surface),
            sigma0=lambda: m.sigma0(ion, E),
            sigma1=lambda: m.sigma1(ion, surface, E),
            sigma2=lambda: m.sigma2(ion, surface, E),
            sigma_total=lambda: m.sigma_total(ion, surface, E),
        )
    else:
        E = ev_to_hartree(spec.photon_ev) - ion.binding_energy
        extra = [np.full(n, spec.photon_ev), np.full(n, spec.geometry.distance)]
        out["j_z"] = lambda: m.screen_flux(ion, surface, E, spec.geometry, x)
    cols = [x] + const + extra + [np.broadcast_to(np.asarray(out[q](), dtype=float), (n,)) for q in spec.outputs]
    return np.column_stack(cols)


def run_sweep(spec, workers=1, chunk=512):
    """Tabulate a sweep.

    Rows come out in ascending swept value; for equal values, walls follow
    ``spec.surfaces`` order.  Chunks of the grid may be evaluated on
    ``workers`` threads; every value is computed elementwise so the result
    does not depend on ``workers`` or ``chunk``.
    """
    spec.validate()
    x = spec.grid()
    pieces = [x[i : i + chunk] for i in range(0, x.size, chunk)]

    def block(piece):
        parts = [_evaluate(spec, s, piece) for s in spec.surfaces]
        # interleave: row (i, wall j) -> i * nwalls + j
        return np.stack(parts, axis=1).reshape(-1, parts[0].shape[1])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(block, pieces))
    else:
        blocks = [block(p) for p in pieces]
    return Table(spec.columns, np.concatenate(blocks, axis=0))


def format_value(value):
    return f"{value:.11e}"


def write_table(table, destination):
    """Write a table as UTF-8 CSV with LF endings and 12 significant digits.

    ``destination`` is a path or a text stream.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(v) for v in row])
    text = buf.getvalue()
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write table to {destination}: {exc}") from exc


def read_table(source):
    """Inverse of :func:`write_table`."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    rows = list(csv.reader(io.StringIO(text)))
    columns = tuple(rows[0])
    return Table(columns, [[float(v) for v in r] for r in rows[1:] if r])


# --- figure presets -------------------------------------------------------------

FIG_REFLECTIONS = (1.0, 0.7, 0.4)
FIG_PHASES = (1.0, 1.5, 2.0)
FIG_WALL_DISTANCE = 100.0

FIG4_REFLECTIONS = (1.0, 0.5, 0.1)
FIG4_PHASES = (1.0, 2.0)
FIG4_PHOTON_EV = 1.0
FIG4_SCREEN_DISTANCE = 10000.0

# The figures' axis ranges are not given numerically; these are choices.
FIG2_U_RANGE = (0.5, 60.0, 1200)
FIG3_ABOVE_THRESHOLD_EV = (0.01, 1.0, 2000)
FIG4_RHO_RANGE = (0.0, 30000.0, 3001)


def _walls(reflections, phases, d=FIG_WALL_DISTANCE):
    return tuple(m.SurfaceModel(K, mu, d) for K in reflections for mu in phases)


def preset(name, ion=m.IonModel()):
    """SweepSpec reproducing the dataset behind one of the model's figures.

    ``fig2``: modulation A(u) for K in (1, 0.7, 0.4) x mu in (1, 1.5, 2).
    ``fig3``: cross sections versus photon energy at d = 100 bohr, same walls.
    ``fig4``: screen flux at E_ph = 1 eV, L = 10^4 bohr, d = 100 bohr, for
    K in (1, 0.5, 0.1) x mu in (1, 2).
    """
    if name == "fig2":
        start, stop, count = FIG2_U_RANGE
        return SweepSpec("u", start, stop, count, _walls(FIG_REFLECTIONS, FIG_PHASES), ("A",), ion)
    if name == "fig3":
        lo, hi, count = FIG3_ABOVE_THRESHOLD_EV
        eb_ev = hartree_to_ev(ion.binding_energy)
        return SweepSpec(
            "E_ph_eV", eb_ev + lo, eb_ev + hi, count,
            _walls(FIG_REFLECTIONS, FIG_PHASES),
            ("sigma0", "sigma1", "sigma2", "sigma_total", "A"), ion,
        )
    if name == "fig4":
        start, stop, count = FIG4_RHO_RANGE
        return SweepSpec(
            "rho_bohr", start, stop, count,
            _walls(FIG4_REFLECTIONS, FIG4_PHASES), ("j_z",), ion,
            geometry=m.ScreenGeometry(FIG4_SCREEN_DISTANCE),
            photon_ev=FIG4_PHOTON_EV,
        )
    raise SweepError(f"preset: unknown preset {name!r} (choose fig2, fig3, fig4)")


PRESETS = ("fig2", "fig3", "fig4")


# --- config files ---------------------------------------------------------------


def read_config(path):
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    config = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            config[key.replace("-", "_")] = value
    return config


def curve_amplitude(table, K, mu):
    """Peak-to-trough amplitude of column A for one wall."""
    sel = (table.column("K") == K) & (table.column("mu") == mu)
    a = table.column("A")[sel]
    return float(a.max() - a.min())


def fringe_contrast(table, K, mu):
    """Visibility (max - min) / (max + min) of j_z with the geometric L^3/(rho^2+L^2)^{5/2} fall-off removed."""
    sel = (table.column("K") == K) & (table.column("mu") == mu)
    rho = table.column("rho_bohr")[sel]
    L = table.column("L_bohr")[sel]
    flattened = table.column("j_z_au")[sel] * np.hypot(rho, L) ** 5 / L**3
    return float((flattened.max() - flattened.min()) / (flattened.max() + flattened.min()))
