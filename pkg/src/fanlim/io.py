"""JSON codecs for fans, presheaves and maps, and report serialization.

Cone keys in files are comma-joined ray indices ("" for the trivial
cone); structure matrices are keyed "bigkey->smallkey" and stored as
sparse quadruples [row, col, coeff, shift].  Coefficients are integers
or exact rational strings like "3/4"; no floats anywhere.
"""

import json
from fractions import Fraction

from .errors import FanlimError
from .fan import validate_fan
from .monomial import MonomialComplex, MonomialEntry
from .presheaves import MonomialPresheaf, PresheafMap
from .regions import Region


def cone_key_str(key):
    return ",".join(str(i) for i in key)


def parse_cone_key(s):
    s = s.strip()
    if not s:
        return ()
    return tuple(int(x) for x in s.split(","))


def coeff_to_json(c):
    c = Fraction(c)
    if c.denominator == 1:
        return int(c)
    return f"{c.numerator}/{c.denominator}"


def coeff_from_json(v):
    if isinstance(v, bool) or isinstance(v, float):
        raise ValueError(f"coefficients must be exact, got {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise ValueError(f"bad coefficient {v!r}")


# ------------------------------------------------------------------ fans


def fan_to_json(fan):
    return {
        "rank": fan.rank,
        "rays": [list(r) for r in fan.rays],
        "max_cones": sorted([sorted(c) for c in fan.maximal_cones()]),
    }


def fan_from_json(data):
    try:
        rank = data["rank"]
        rays = data["rays"]
        max_cones = data["max_cones"]
    except (KeyError, TypeError) as exc:
        raise FanlimError(f"fan file missing field: {exc}") from None
    return validate_fan(rank, rays, max_cones)


def load_fan(path):
    with open(path) as fh:
        return fan_from_json(json.load(fh))


# ------------------------------------------------------------- presheaves


def _entries_to_json(es):
    out = []
    for (i, j), e in sorted(es.items()):
        out.append([i, j, coeff_to_json(e.coeff), list(e.shift)])
    return out


def _entries_from_json(rows):
    out = {}
    for row in rows:
        i, j, coeff, shift = row
        out[(int(i), int(j))] = MonomialEntry(coeff_from_json(coeff),
                                              tuple(int(x) for x in shift))
    return out


def _region_to_json(reg):
    if reg.empty:
        return {"empty": True}
    return [[r, rel, b] for r, rel, b in reg.constraints]


def _region_from_json(data):
    if isinstance(data, dict) and data.get("empty"):
        return Region.empty_region()
    return Region.make([(int(r), rel, int(b)) for r, rel, b in data])


def presheaf_to_json(c):
    cones = {}
    for key in c.poset.elements:
        mc = c.complexes[key]
        if mc.is_zero():
            continue
        cones[cone_key_str(key)] = {
            "summands": {str(n): [_region_to_json(r) for r in mc.summands[n]]
                         for n in mc.degrees()},
            "differential": {str(n): _entries_to_json(es)
                             for n, es in sorted(mc.diff.items())},
        }
    structure = {}
    for (big, small), mats in sorted(c.structure.items()):
        flat = {str(n): _entries_to_json(es) for n, es in sorted(mats.items())
                if es}
        if flat:
            structure[f"{cone_key_str(big)}->{cone_key_str(small)}"] = flat
    return {"fan": fan_to_json(c.fan), "cones": cones, "structure": structure}


def presheaf_from_json(data, fan=None):
    fan = fan or fan_from_json(data["fan"])
    complexes = {}
    for key_s, body in data.get("cones", {}).items():
        key = parse_cone_key(key_s)
        summands = {int(n): tuple(_region_from_json(r) for r in regs)
                    for n, regs in body.get("summands", {}).items()}
        diff = {int(n): _entries_from_json(rows)
                for n, rows in body.get("differential", {}).items()}
        complexes[key] = MonomialComplex(fan, summands, diff)
    structure = {}
    for pair_s, mats in data.get("structure", {}).items():
        big_s, small_s = pair_s.split("->")
        pair = (parse_cone_key(big_s), parse_cone_key(small_s))
        structure[pair] = {int(n): _entries_from_json(rows)
                           for n, rows in mats.items()}
    return MonomialPresheaf(fan, complexes, structure, check=True)


def load_presheaf(path):
    with open(path) as fh:
        return presheaf_from_json(json.load(fh))


def map_to_json(f):
    comps = {}
    for key, mats in sorted(f.comps.items()):
        flat = {str(n): _entries_to_json(es) for n, es in sorted(mats.items())
                if es}
        if flat:
            comps[cone_key_str(key)] = flat
    return {
        "source": presheaf_to_json(f.source),
        "target": presheaf_to_json(f.target),
        "components": comps,
    }


def map_from_json(data):
    source = presheaf_from_json(data["source"])
    target = presheaf_from_json(data["target"])
    comps = {}
    for key_s, mats in data.get("components", {}).items():
        comps[parse_cone_key(key_s)] = {
            int(n): _entries_from_json(rows) for n, rows in mats.items()}
    return PresheafMap(source, target, comps, check=True)


def load_map(path):
    with open(path) as fh:
        return map_from_json(json.load(fh))


# ------------------------------------------------------------- reports


def table_to_json(table):
    return {
        "window": table.window,
        "complete": table.complete,
        "entries": [
            {"m": list(m), "degree": deg, "h": -deg, "dim": dim}
            for m, deg, dim in table.entries
        ],
        "total": {str(deg): dim for deg, dim in sorted(table.total().items())},
    }


def table_to_tsv(table):
    lines = []
    rank = len(table.entries[0][0]) if table.entries else 0
    header = [f"m{i + 1}" for i in range(rank)] + ["degree", "dim"]
    lines.append("\t".join(header))
    for m, deg, dim in table.entries:
        lines.append("\t".join(str(x) for x in (*m, deg, dim)))
    return "\n".join(lines) + "\n"


def dumps_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def rsigma_to_tsv(vectors):
    return "\n".join("\t".join(str(x) for x in v) for v in vectors) + "\n"
