"""Reading and writing group data files.

A group data file is JSON::

    {
      "name": "z2",
      "generators": ["a", "b"],
      "relators": ["a b A B"],          # upper/lower-case swap = inverse
      "normal_form": "abelian",          # free | abelian | rewriting | none
      "rules": [["lhs", "rhs"], ...],    # only for rewriting
      "homs": {"alpha": [1, 0], "beta": [0, 1]},
      "cycles": [
        {"terms": [{"coeff": 1, "cell": ["a", "b"]}, ...],
         "verified": "direct" | "relators" |
                     {"pushforward": {"source_group": "z2", "source_cycle": 0,
                                      "splitting": ["x0 X1", ...],
                                      "relator_witnesses": [[{"conjugator": "", "relator": 0, "power": 1}], ...]}}}
      ]
    }

Every cycle is re-verified on load; a file whose claims do not check out is
rejected with :class:`GroupDataError`.
"""

from dataclasses import dataclass, field
from importlib import resources
import json
from pathlib import Path

from .bar_complex import Chain, PushforwardRecord, push_forward_chain, verify_by_relator_lift, verify_direct
from .errors import CannotVerifyError, GroupDataError, HomomorphismError
from .group_model import GroupData, GroupMorphism, check_hom

SHIPPED = ("z2", "free2", "surface_genus2", "thompson_f", "houghton3")


@dataclass
class GroupDataset:
    name: str
    group: GroupData
    alpha: object = None
    beta: object = None
    cycles: list = field(default_factory=list)
    description: str = ""
    source: str = ""
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def cycle(self):
        if not self.cycles:
            raise GroupDataError(f"group {self.name} ships no 2-cycle")
        return self.cycles[0]


def group_from_json(d):
    try:
        return GroupData(
            generators=tuple(d["generators"]),
            relators=tuple(d.get("relators", ())),
            normal_form=d.get("normal_form", "free"),
            rules=tuple(tuple(r) for r in d.get("rules", ())),
            name=d.get("name", ""),
            max_rewrites=int(d.get("max_rewrites", 10_000)),
        )
    except KeyError as exc:
        raise GroupDataError(f"group data missing field {exc}") from None


def _resolve(source, base_dir=None):
    """Locate a group file: an existing path, a path relative to ``base_dir``, or a shipped name."""
    if isinstance(source, Path) or "/" in str(source) or str(source).endswith(".json"):
        p = Path(source)
        if p.exists():
            return p.read_text(), str(p)
        if base_dir is not None and (Path(base_dir) / p).exists():
            q = Path(base_dir) / p
            return q.read_text(), str(q)
    stem = Path(str(source)).stem
    if stem in SHIPPED:
        text = resources.files("asymrep.data").joinpath(f"{stem}.json").read_text()
        return text, f"{stem}.json"
    raise GroupDataError(f"cannot find group data {source!r}")


def _witnesses(G, raw):
    out = []
    for per_relator in raw or []:
        out.append([(G.parse(w.get("conjugator", "")), int(w["relator"]), int(w.get("power", 1))) for w in per_relator])
    return out


def parse_cycle(G, entry, base_dir=None, _seen=()):
    """Build and verify one cycle entry of a group data file."""
    terms = [(int(t["coeff"]), tuple(t["cell"])) for t in entry.get("terms", [])]
    declared = Chain.parse(G, terms) if terms else None
    mode = entry.get("verified")
    try:
        if mode == "direct":
            return verify_direct(declared)
        if mode == "relators":
            return verify_by_relator_lift(declared)
        if isinstance(mode, dict) and "pushforward" in mode:
            pf = mode["pushforward"]
            src_name = pf["source_group"]
            if src_name in _seen:
                raise GroupDataError(f"circular pushforward through {src_name}")
            if "source_group_data" in pf:
                src_group = group_from_json(pf["source_group_data"])
            else:
                src_group = load_group_data(src_name, base_dir=base_dir, _seen=_seen + (G.name,)).group
            if "source_cycle" in pf and isinstance(pf["source_cycle"], dict):
                src_cycle = parse_cycle(src_group, pf["source_cycle"], base_dir, _seen + (G.name,))
            else:
                ds = load_group_data(src_name, base_dir=base_dir, _seen=_seen + (G.name,))
                src_cycle = ds.cycles[int(pf.get("source_cycle", 0))]
            s = GroupMorphism(src_group, G, tuple(G.parse(w) for w in pf["splitting"]))
            pushed = push_forward_chain(
                s, src_cycle, relator_witnesses=_witnesses(G, pf.get("relator_witnesses")), source_name=src_name
            )
            if not isinstance(pushed.verified, PushforwardRecord):
                raise GroupDataError("pushforward source is not a verified cycle")
            if declared is not None and declared != pushed:
                raise GroupDataError(f"declared terms {declared!r} differ from pushforward {pushed!r}")
            return pushed
        if mode is None:
            return declared
    except (CannotVerifyError, HomomorphismError) as exc:
        raise GroupDataError(f"cycle failed verification: {exc}") from exc
    raise GroupDataError(f"unknown verification mode {mode!r}")


def load_group_data(source, base_dir=None, _seen=()):
    """Load a group data file by path or shipped name (``"z2"``, ``"thompson_f.json"``, ...)."""
    if isinstance(source, dict):
        d, origin = source, "<dict>"
    else:
        text, origin = _resolve(source, base_dir)
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GroupDataError(f"{origin}: invalid JSON: {exc}") from None
        base_dir = Path(origin).parent if Path(origin).exists() else base_dir
    G = group_from_json(d)
    homs = d.get("homs", {})
    try:
        alpha = check_hom(G, homs["alpha"]) if "alpha" in homs else None
        beta = check_hom(G, homs["beta"]) if "beta" in homs else None
    except HomomorphismError as exc:
        raise GroupDataError(f"{origin}: {exc}") from exc
    cycles = [parse_cycle(G, entry, base_dir, _seen) for entry in d.get("cycles", [])]
    return GroupDataset(
        name=d.get("name", Path(origin).stem),
        group=G,
        alpha=alpha,
        beta=beta,
        cycles=cycles,
        description=d.get("description", ""),
        source=origin,
        raw=d,
    )
