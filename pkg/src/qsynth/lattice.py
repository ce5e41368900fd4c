"""Lattice geometry, site orderings, fermion layout and the model builder.

Sites are numbered 1..L**d. ``row_major_lex`` compares the last coordinate
first; ``snake`` reverses direction on alternate rows (and alternate planes
in 3D) so that consecutive indices are always lattice neighbours.
"""
from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

from .boson import BosonRegister

ORDERINGS = ("row_major_lex", "snake")
BOUNDARIES = ("periodic", "open")
_COLORS = {(0, False): "black", (0, True): "blue", (1, False): "red", (1, True): "orange"}


@dataclass(frozen=True)
class LatticeGeometry:
    dims: int
    extent: int
    boundary: str = "periodic"
    ordering: str = "row_major_lex"

    def __post_init__(self):
        if self.dims < 1:
            raise ValueError("dims must be >= 1")
        if self.extent < 1:
            raise ValueError("extent must be >= 1")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")
        if self.ordering not in ORDERINGS:
            raise ValueError(f"ordering must be one of {ORDERINGS}")

    @property
    def num_sites(self) -> int:
        return self.extent ** self.dims

    def site_index(self, coords: Sequence[int]) -> int:
        return site_index(coords, self)

    def site_coords(self, index: int) -> tuple[int, ...]:
        return site_coords(index, self)

    def sites(self) -> range:
        return range(1, self.num_sites + 1)

    def has_wrap_links(self) -> bool:
        # at L <= 2 a wrap link would duplicate an interior one
        return self.boundary == "periodic" and self.extent > 2

    def links(self) -> list["Link"]:
        return classify_links(self)

    def is_neighbor(self, n: int, m: int) -> bool:
        return frozenset((n, m)) in _link_set(self)


@dataclass(frozen=True)
class Link:
    a: int
    b: int
    axis: int
    wrap: bool

    @property
    def lower(self) -> int:
        return min(self.a, self.b)

    @property
    def upper(self) -> int:
        return max(self.a, self.b)

    @property
    def color(self) -> str:
        return _COLORS.get((self.axis, self.wrap),
                           f"axis{self.axis + 1}-{'wrap' if self.wrap else 'interior'}")


def _check_coords(coords: Sequence[int], g: LatticeGeometry) -> None:
    if len(coords) != g.dims:
        raise ValueError(f"expected {g.dims} coordinates, got {len(coords)}")
    for c in coords:
        if not 1 <= c <= g.extent:
            raise ValueError(f"coordinate {c} outside 1..{g.extent}")


def site_index(coords: Sequence[int], g: LatticeGeometry) -> int:
    _check_coords(coords, g)
    L = g.extent
    if g.ordering == "row_major_lex":
        return 1 + sum((c - 1) * L ** i for i, c in enumerate(coords))
    idx = coords[0]
    for k in range(1, g.dims):
        block = L ** k
        inner = idx if coords[k] % 2 == 1 else block + 1 - idx
        idx = (coords[k] - 1) * block + inner
    return idx


def site_coords(index: int, g: LatticeGeometry) -> tuple[int, ...]:
    if not 1 <= index <= g.num_sites:
        raise ValueError(f"site index {index} outside 1..{g.num_sites}")
    L = g.extent
    if g.ordering == "row_major_lex":
        r = index - 1
        return tuple(r // L ** i % L + 1 for i in range(g.dims))
    coords = [0] * g.dims
    idx = index
    for k in range(g.dims - 1, 0, -1):
        block = L ** k
        ck = (idx - 1) // block + 1
        inner = idx - (ck - 1) * block
        idx = inner if ck % 2 == 1 else block + 1 - inner
        coords[k] = ck
    coords[0] = idx
    return tuple(coords)


def classify_links(g: LatticeGeometry) -> list[Link]:
    """Every nearest-neighbour link once, grouped by (axis, interior/wrap), lower site ascending."""
    groups: dict[tuple[int, bool], list[Link]] = {}
    L = g.extent
    for coords in itertools.product(range(1, L + 1), repeat=g.dims):
        n = site_index(coords, g)
        for axis in range(g.dims):
            if coords[axis] < L:
                nb = list(coords)
                nb[axis] += 1
                groups.setdefault((axis, False), []).append(Link(n, site_index(nb, g), axis, False))
            elif g.has_wrap_links():
                nb = list(coords)
                nb[axis] = 1
                groups.setdefault((axis, True), []).append(Link(n, site_index(nb, g), axis, True))
    out = []
    for axis in range(g.dims):
        for wrap in (False, True):
            out += sorted(groups.get((axis, wrap), []), key=lambda lk: (lk.lower, lk.upper))
    return out


_LINK_CACHE: dict[LatticeGeometry, frozenset] = {}


def _link_set(g: LatticeGeometry) -> frozenset:
    if g not in _LINK_CACHE:
        _LINK_CACHE[g] = frozenset(frozenset((lk.a, lk.b)) for lk in classify_links(g))
    return _LINK_CACHE[g]


@dataclass(frozen=True)
class FermionLayout:
    """Complex fermion modes per site, optionally followed by auxiliary modes.

    Mode ``a`` (1-based) at site ``n`` is complex mode ``w*(n-1) + a`` where
    ``w = modes_per_site + aux_per_site``; auxiliary modes come right after the
    site's matter modes. Complex mode ``j`` owns Majoranas ``2j-1`` and ``2j``
    and fermionic qubit ``j``.
    """

    modes_per_site: int
    geometry: LatticeGeometry
    aux_per_site: int = 0

    @property
    def block_width(self) -> int:
        return self.modes_per_site + self.aux_per_site

    @property
    def num_modes(self) -> int:
        return self.block_width * self.geometry.num_sites

    @property
    def num_majoranas(self) -> int:
        return 2 * self.num_modes

    @property
    def matter_qubits(self) -> int:
        return self.modes_per_site * self.geometry.num_sites

    @property
    def aux_qubits(self) -> int:
        return self.aux_per_site * self.geometry.num_sites

    def complex_mode(self, site: int, a: int) -> int:
        if not 1 <= a <= self.modes_per_site:
            raise ValueError(f"mode {a} outside 1..{self.modes_per_site}")
        if not 1 <= site <= self.geometry.num_sites:
            raise ValueError(f"site {site} outside lattice")
        return self.block_width * (site - 1) + a

    def aux_mode(self, site: int, k: int) -> int:
        if not 1 <= k <= self.aux_per_site:
            raise ValueError(f"auxiliary mode {k} outside 1..{self.aux_per_site}")
        return self.block_width * (site - 1) + self.modes_per_site + k

    def with_aux(self, aux_per_site: int) -> "FermionLayout":
        return FermionLayout(self.modes_per_site, self.geometry, aux_per_site)


@dataclass(frozen=True)
class PotentialTerm:
    coeff: float
    bosons: tuple[int, ...]


@dataclass(frozen=True)
class HoppingTerm:
    """``coeff * Psi_{n,a}^(dag) Psi_{n',b}^(dag) * prod_b x_b**power``.

    The compiler adds the Hermitian conjugate unless the term is already
    self-adjoint.
    """

    n: int
    nprime: int
    a: int = 1
    b: int = 1
    dagger: tuple[bool, bool] = (True, False)
    coeff: complex = 1.0
    boson_monomial: tuple[tuple[int, int], ...] = ()

    @property
    def monomial_degree(self) -> int:
        return sum(p for _, p in self.boson_monomial)


@dataclass
class HamiltonianModel:
    """``sum_a p_a^2/2 + V(x) + fermion bilinears`` on a lattice."""

    boson: BosonRegister
    geometry: LatticeGeometry
    layout: FermionLayout
    potential_terms: list[PotentialTerm] = field(default_factory=list)
    hopping_terms: list[HoppingTerm] = field(default_factory=list)
    kinetic: bool = True
    max_monomial_degree: int = 4
    name: str = "custom"
    config: dict[str, Any] | None = None

    def __post_init__(self):
        if self.layout.geometry != self.geometry:
            raise ValueError("fermion layout geometry differs from model geometry")
        nb = self.boson.num_bosons
        for t in self.potential_terms:
            if not t.bosons:
                raise ValueError("potential term without boson factors")
            for b in t.bosons:
                if not 0 <= b < nb:
                    raise ValueError(f"potential term references boson {b}, model has {nb}")
        for t in self.hopping_terms:
            self._check_hopping(t)

    def _check_hopping(self, t: HoppingTerm) -> None:
        g = self.geometry
        for site in (t.n, t.nprime):
            if not 1 <= site <= g.num_sites:
                raise ValueError(f"hopping term site {site} outside 1..{g.num_sites}")
        for mode in (t.a, t.b):
            if not 1 <= mode <= self.layout.modes_per_site:
                raise ValueError(f"hopping term mode {mode} outside 1..{self.layout.modes_per_site}")
        if t.n != t.nprime and not g.is_neighbor(t.n, t.nprime):
            raise ValueError(f"sites {t.n} and {t.nprime} are not nearest neighbours")
        if t.n == t.nprime and t.a == t.b and t.dagger[0] == t.dagger[1]:
            raise ValueError("on-site term squares a single mode operator to zero")
        for b, power in t.boson_monomial:
            if not 0 <= b < self.boson.num_bosons or power < 1:
                raise ValueError(f"invalid boson factor ({b}, {power})")
        if t.monomial_degree > self.max_monomial_degree:
            raise ValueError(f"boson monomial degree {t.monomial_degree} exceeds "
                             f"{self.max_monomial_degree}")

    @property
    def num_qubits(self) -> int:
        return self.boson.num_qubits + self.layout.num_modes

    def content_hash(self) -> str:
        payload = json.dumps(self.to_config(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def to_config(self) -> dict[str, Any]:
        if self.config is not None:
            return self.config
        return model_to_config(self)


def _site_boson(site: int, per_site: int, k: int = 0) -> int:
    return (site - 1) * per_site + k


def harmonic_chain(L: int = 4, Q: int = 2, R: float = 3.0, omega: float = 1.0,
                   coupling: float = 0.5, boundary: str = "open") -> HamiltonianModel:
    g = LatticeGeometry(1, L, boundary)
    reg = BosonRegister(L, Q, R)
    pot = [PotentialTerm(omega ** 2 / 2, (b, b)) for b in range(L)]
    for lk in g.links():
        a, b = lk.a - 1, lk.b - 1
        pot += [PotentialTerm(coupling / 2, (a, a)), PotentialTerm(coupling / 2, (b, b)),
                PotentialTerm(-coupling, (a, b))]
    return HamiltonianModel(reg, g, FermionLayout(0, g), pot, [], name="harmonic_chain")


def quartic_oscillator(num_bosons: int = 1, Q: int = 3, R: float = 3.0, mass2: float = 1.0,
                       quartic: float = 0.1) -> HamiltonianModel:
    g = LatticeGeometry(1, num_bosons, "open")
    reg = BosonRegister(num_bosons, Q, R)
    pot = []
    for b in range(num_bosons):
        pot += [PotentialTerm(mass2 / 2, (b, b)), PotentialTerm(quartic, (b, b, b, b))]
    return HamiltonianModel(reg, g, FermionLayout(0, g), pot, [], name="quartic_oscillator")


def hopping_toy(d: int = 1, L: int = 2, Q: int = 1, R: float = 1.0, boundary: str = "open",
                ordering: str = "row_major_lex", hopping: float = 1.0,
                mass: float = 0.5, modes: int = 1) -> HamiltonianModel:
    """``modes`` complex fermions and (for ``Q > 0``) one boson per site.

    Links carry ``hopping * Psi_{n,a}^dag Psi_{n',a} * x_n`` plus conjugate,
    sites a staggered mass ``mass * (-1)**(sum coords) * Psi^dag Psi``, bosons
    a harmonic potential ``x**2 / 2``.
    """
    if modes < 1:
        raise ValueError("modes must be >= 1")
    g = LatticeGeometry(d, L, boundary, ordering)
    nb = g.num_sites if Q > 0 else 0
    reg = BosonRegister(nb, max(Q, 1), R)
    pot = [PotentialTerm(0.5, (b, b)) for b in range(nb)]
    hop = []
    for lk in g.links():
        mono = ((lk.a - 1, 1),) if nb else ()
        for a in range(1, modes + 1):
            hop.append(HoppingTerm(lk.a, lk.b, a, a, (True, False), complex(hopping), mono))
    if mass:
        for n in g.sites():
            sign = (-1) ** sum(g.site_coords(n))
            for a in range(1, modes + 1):
                hop.append(HoppingTerm(n, n, a, a, (True, False), complex(mass * sign)))
    return HamiltonianModel(reg, g, FermionLayout(modes, g), pot, hop, name="hopping_toy")


def qcd_layout(N_c: int = 3, N_f: int = 2, d: int = 3, L: int = 2, Q: int = 1, R: float = 1.0,
               boundary: str = "periodic", ordering: str = "row_major_lex") -> HamiltonianModel:
    """Fermion layout of SU(N_c) with N_f Dirac flavours; unit hopping coefficients.

    Each site holds ``8 N_c N_f`` real (``4 N_c N_f`` complex) fermion modes
    and one boson per forward link direction.
    """
    if N_c < 1 or N_f < 1:
        raise ValueError("N_c and N_f must be >= 1")
    g = LatticeGeometry(d, L, boundary, ordering)
    m = 4 * N_c * N_f
    reg = BosonRegister(d * g.num_sites, Q, R)
    hop = []
    for lk in g.links():
        mono = ((_site_boson(lk.a, d, lk.axis), 1),)
        for a in range(1, m + 1):
            hop.append(HoppingTerm(lk.a, lk.b, a, a, (True, False), 1.0, mono))
    return HamiltonianModel(reg, g, FermionLayout(m, g), [], hop, name="qcd_layout")


PRESETS = {
    "harmonic_chain": harmonic_chain,
    "quartic_oscillator": quartic_oscillator,
    "hopping_toy": hopping_toy,
    "qcd_layout": qcd_layout,
}


def build_preset(name: str, params: dict[str, Any] | None = None) -> HamiltonianModel:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    try:
        model = PRESETS[name](**(params or {}))
    except TypeError as exc:
        raise ValueError(f"invalid parameters for preset {name!r}: {exc}") from None
    model.config = {"preset": {"name": name, "params": dict(params or {})}}
    return model


_TOP_FIELDS = {"dims", "extent", "boundary", "ordering", "boson", "fermion", "potential",
               "hopping", "preset", "kinetic"}


def _require_keys(obj: dict, allowed: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise ValueError(f"{where} must be an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ValueError(f"unknown field(s) in {where}: {', '.join(sorted(unknown))}")


def model_from_config(cfg: dict[str, Any]) -> HamiltonianModel:
    """Build a model from the JSON config schema; unknown fields are rejected."""
    _require_keys(cfg, _TOP_FIELDS, "model")
    if "preset" in cfg:
        if set(cfg) - {"preset"}:
            raise ValueError("a preset model takes no other top-level fields")
        _require_keys(cfg["preset"], {"name", "params"}, "preset")
        return build_preset(cfg["preset"]["name"], cfg["preset"].get("params"))
    for key in ("dims", "extent"):
        if key not in cfg:
            raise ValueError(f"model is missing required field {key!r}")
    g = LatticeGeometry(int(cfg["dims"]), int(cfg["extent"]), cfg.get("boundary", "periodic"),
                        cfg.get("ordering", "row_major_lex"))
    bos = cfg.get("boson", {"num": 0, "Q": 1, "R": 1.0})
    _require_keys(bos, {"num", "Q", "R"}, "boson")
    reg = BosonRegister(int(bos.get("num", 0)), int(bos.get("Q", 1)), float(bos.get("R", 1.0)))
    fer = cfg.get("fermion", {"modes_per_site": 0})
    _require_keys(fer, {"modes_per_site"}, "fermion")
    layout = FermionLayout(int(fer.get("modes_per_site", 0)), g)
    pot = []
    for i, t in enumerate(cfg.get("potential", [])):
        _require_keys(t, {"coeff", "bosons"}, f"potential[{i}]")
        pot.append(PotentialTerm(float(t["coeff"]), tuple(int(b) for b in t["bosons"])))
    hop = []
    for i, t in enumerate(cfg.get("hopping", [])):
        _require_keys(t, {"n", "nprime", "a", "b", "dagger", "coeff", "boson_monomial"},
                      f"hopping[{i}]")
        coeff = t.get("coeff", {"re": 1.0, "im": 0.0})
        _require_keys(coeff, {"re", "im"}, f"hopping[{i}].coeff")
        mono = []
        for j, f in enumerate(t.get("boson_monomial", [])):
            _require_keys(f, {"boson", "power"}, f"hopping[{i}].boson_monomial[{j}]")
            mono.append((int(f["boson"]), int(f.get("power", 1))))
        dagger = t.get("dagger", [True, False])
        if len(dagger) != 2:
            raise ValueError(f"hopping[{i}].dagger must have two entries")
        hop.append(HoppingTerm(int(t["n"]), int(t["nprime"]), int(t.get("a", 1)),
                               int(t.get("b", 1)), (bool(dagger[0]), bool(dagger[1])),
                               complex(float(coeff.get("re", 0.0)), float(coeff.get("im", 0.0))),
                               tuple(mono)))
    model = HamiltonianModel(reg, g, layout, pot, hop, kinetic=bool(cfg.get("kinetic", True)))
    model.config = json.loads(json.dumps(cfg))
    return model


def model_to_config(model: HamiltonianModel) -> dict[str, Any]:
    g = model.geometry
    return {
        "dims": g.dims,
        "extent": g.extent,
        "boundary": g.boundary,
        "ordering": g.ordering,
        "boson": {"num": model.boson.num_bosons, "Q": model.boson.qubits_per_boson,
                  "R": model.boson.box_radius},
        "fermion": {"modes_per_site": model.layout.modes_per_site},
        "kinetic": model.kinetic,
        "potential": [{"coeff": t.coeff, "bosons": list(t.bosons)} for t in model.potential_terms],
        "hopping": [{"n": t.n, "nprime": t.nprime, "a": t.a, "b": t.b, "dagger": list(t.dagger),
                     "coeff": {"re": complex(t.coeff).real, "im": complex(t.coeff).imag},
                     "boson_monomial": [{"boson": b, "power": p} for b, p in t.boson_monomial]}
                    for t in model.hopping_terms],
    }


def load_model(path) -> HamiltonianModel:
    with open(path) as fh:
        return model_from_config(json.load(fh))


def replace_geometry(model: HamiltonianModel, **changes) -> HamiltonianModel:
    """Same model with geometry fields changed (ordering relabels sites, terms follow coordinates)."""
    old = model.geometry
    new = LatticeGeometry(**{**asdict(old), **changes})
    if new.dims != old.dims or new.extent != old.extent:
        raise ValueError("only boundary/ordering may change")
    remap = {n: new.site_index(old.site_coords(n)) for n in old.sites()}
    hop = [HoppingTerm(remap[t.n], remap[t.nprime], t.a, t.b, t.dagger, t.coeff, t.boson_monomial)
           for t in model.hopping_terms]
    layout = FermionLayout(model.layout.modes_per_site, new, model.layout.aux_per_site)
    return HamiltonianModel(model.boson, new, layout, list(model.potential_terms), hop,
                            model.kinetic, model.max_monomial_degree, model.name)
