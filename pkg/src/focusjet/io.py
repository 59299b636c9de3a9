"""Plain-text formats for jets, tuples, Hessians and families.

Jet block::

    order 3
    1 0 2 0
    0 1 0 1

one ``p q re im`` line per nonzero coefficient, written with 17 significant
digits so that a write/read round trip is bit exact.  Blank lines and
``#`` comments are ignored everywhere.
"""

import re

import numpy as np

from .errors import ContractError, ParseError
from .jetcalc import Jet2


def _fmt(x):
    return f"{float(x) + 0.0:.17g}"  # no "-0"


def format_complex(c):
    c = complex(c)
    return f"{_fmt(c.real)}{'+' if c.imag >= 0 or np.isnan(c.imag) else '-'}{_fmt(abs(c.imag))}i"


_COMPLEX_RE = re.compile(r"^[+-]?[0-9.eE+-]*i?$")


def parse_complex(text):
    """Parse ``re+imi`` literals such as ``1+2i``, ``-0.5i``, ``3``."""
    s = text.strip().replace(" ", "")
    if not s or not _COMPLEX_RE.match(s):
        raise ParseError(f"bad complex literal {text!r}")
    if s.endswith("i"):
        s = s[:-1] + "j"
        if s in ("j", "+j", "-j"):
            s = s.replace("j", "1j")
    try:
        return complex(s)
    except ValueError:
        raise ParseError(f"bad complex literal {text!r}") from None


def _lines(text):
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def _float(tok, what="number"):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"expected a {what}, got {tok!r}") from None


def _int(tok, what="integer"):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an {what}, got {tok!r}") from None


# -- jets -------------------------------------------------------------------------


def format_jet(jet):
    lines = [f"order {jet.order}"]
    for (p, q), c in sorted(jet.terms().items(), key=lambda kv: (kv[0][0] + kv[0][1], -kv[0][0])):
        lines.append(f"{p} {q} {_fmt(c.real)} {_fmt(c.imag)}")
    return "\n".join(lines) + "\n"


def _read_jet(lines, pos):
    head = lines[pos].split()
    if len(head) != 2 or head[0] != "order":
        raise ParseError(f"expected 'order k', got {lines[pos]!r}")
    k = _int(head[1], "order")
    arr = np.zeros((k + 1, k + 1), dtype=np.complex128)
    pos += 1
    while pos < len(lines) and lines[pos].split()[0] not in ("order", "map", "jet"):
        tok = lines[pos].split()
        if len(tok) != 4:
            raise ParseError(f"expected 'p q re im', got {lines[pos]!r}")
        p, q = _int(tok[0]), _int(tok[1])
        if p < 0 or q < 0 or p + q > k:
            raise ParseError(f"monomial ({p}, {q}) outside order {k}")
        arr[p, q] += complex(_float(tok[2]), _float(tok[3]))
        pos += 1
    try:
        return Jet2(arr), pos
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def parse_jet(text):
    lines = _lines(text)
    if not lines:
        raise ParseError("empty jet file")
    jet, pos = _read_jet(lines, 0)
    if pos != len(lines):
        raise ParseError(f"trailing content: {lines[pos]!r}")
    return jet


def _parse_blocks(text, keyword):
    lines = _lines(text)
    if not lines:
        raise ParseError("empty file")
    head = lines[0].split()
    if keyword:
        if head[:1] != [keyword]:
            raise ParseError(f"expected header starting with {keyword!r}")
        head = head[1:]
    if len(head) != 4 or head[0] != "n" or head[2] != "order":
        raise ParseError(f"bad header {lines[0]!r}")
    n, k = _int(head[1]), _int(head[3])
    jets, pos = [], 1
    while pos < len(lines):
        jet, pos = _read_jet(lines, pos)
        if jet.order != k:
            raise ParseError(f"block of order {jet.order} in an order-{k} file")
        jets.append(jet)
    return n, k, jets


def parse_tuple(text):
    """``n N order K`` header followed by N-1 jet blocks."""
    n, _, jets = _parse_blocks(text, None)
    if len(jets) != n - 1:
        raise ParseError(f"header says n={n} but found {len(jets)} jet blocks (need n-1)")
    return jets


def format_tuple(jets):
    k = jets[0].order
    return f"n {len(jets) + 1} order {k}\n" + "".join(format_jet(j) for j in jets)


def parse_gauge(text):
    """``gauge n N order K`` header followed by N jet blocks."""
    n, _, jets = _parse_blocks(text, "gauge")
    if len(jets) != n:
        raise ParseError(f"header says n={n} but found {len(jets)} jet blocks")
    return jets


def format_gauge(jets):
    return f"gauge n {len(jets)} order {jets[0].order}\n" + "".join(format_jet(j) for j in jets)


# -- Hessians ---------------------------------------------------------------------


def parse_hessian(text):
    from .geomlin import HessianForm

    lines = _lines(text)
    if not lines or lines[0] != "hessian":
        raise ParseError("expected header 'hessian'")
    vals = [_float(t) for line in lines[1:] for t in line.split()]
    if len(vals) != 32:
        raise ParseError(f"a Hessian file holds 32 numbers, found {len(vals)}")
    arr = np.array(vals).reshape(2, 4, 4)
    return HessianForm(arr[0], arr[1])


def format_hessian(H):
    rows = ["hessian"]
    for q in (H.q1, H.q2):
        rows.extend(" ".join(_fmt(x) for x in row) for row in q)
    return "\n".join(rows) + "\n"


# -- families ---------------------------------------------------------------------


def parse_family(text):
    """Rank-1 family file.

    ::

        family n_points 2 t_min 0 t_max 1
        point 1
        center 0 0 0 0        # optional
        frame                 # optional, 4 rows of 4 numbers
        1 0 0 0
        ...
        chart order 1
        1 0 : 1 0             # p q : re0 im0 re1 im1 ...  (coefficient c0 + c1 t + ...)
        point 2
        ...
    """
    from .fibrlab import FamilyPoint, Rank1Family

    lines = _lines(text)
    if not lines:
        raise ParseError("empty family file")
    head = lines[0].split()
    if len(head) != 7 or head[0] != "family" or head[1] != "n_points" or head[3] != "t_min" \
            or head[5] != "t_max":
        raise ParseError(f"bad family header {lines[0]!r}")
    npts = _int(head[2])
    t_min, t_max = _float(head[4]), _float(head[6])
    points, pos = [], 1
    while pos < len(lines):
        tok = lines[pos].split()
        if tok[0] != "point":
            raise ParseError(f"expected 'point i', got {lines[pos]!r}")
        pos += 1
        center, frame, order, coeffs = None, None, None, {}
        while pos < len(lines) and not lines[pos].startswith("point"):
            tok = lines[pos].split()
            if tok[0] == "center":
                if len(tok) != 5:
                    raise ParseError("center needs 4 coordinates")
                center = np.array([_float(t) for t in tok[1:]])
                pos += 1
            elif tok[0] == "frame":
                rows = [[_float(t) for t in lines[pos + i].split()] for i in range(1, 5)
                        if pos + i < len(lines)]
                if len(rows) != 4 or any(len(r) != 4 for r in rows):
                    raise ParseError("frame needs 4 rows of 4 numbers")
                frame = np.array(rows)
                pos += 5
            elif tok[0] == "chart":
                if len(tok) != 3 or tok[1] != "order":
                    raise ParseError(f"expected 'chart order k', got {lines[pos]!r}")
                order = _int(tok[2])
                pos += 1
            else:
                if order is None or ":" not in tok:
                    raise ParseError(f"unexpected line {lines[pos]!r}")
                cut = tok.index(":")
                if cut != 2:
                    raise ParseError(f"expected 'p q : ...', got {lines[pos]!r}")
                p, q = _int(tok[0]), _int(tok[1])
                nums = [_float(t) for t in tok[3:]]
                if not nums or len(nums) % 2:
                    raise ParseError("polynomial coefficients come in re/im pairs")
                if p + q > order:
                    raise ParseError(f"monomial ({p}, {q}) outside order {order}")
                coeffs[(p, q)] = [complex(nums[i], nums[i + 1]) for i in range(0, len(nums), 2)]
                pos += 1
        if order is None:
            raise ParseError("point without a chart")
        points.append(FamilyPoint(order, coeffs, frame, center))
    if len(points) != npts:
        raise ParseError(f"header says {npts} points, found {len(points)}")
    try:
        return Rank1Family(t_min, t_max, points)
    except ContractError as exc:
        raise ParseError(str(exc)) from None


def format_family(family):
    out = [f"family n_points {len(family.points)} t_min {_fmt(family.t_min)} "
           f"t_max {_fmt(family.t_max)}"]
    for i, pt in enumerate(family.points, 1):
        out.append(f"point {i}")
        out.append("center " + " ".join(_fmt(x) for x in pt.center))
        if pt.frame is not None and not callable(pt.frame):
            out.append("frame")
            out.extend(" ".join(_fmt(x) for x in row) for row in np.asarray(pt.frame))
        out.append(f"chart order {pt.order}")
        for (p, q), poly in sorted(pt.coeffs.items()):
            nums = " ".join(f"{_fmt(c.real)} {_fmt(c.imag)}" for c in map(complex, poly))
            out.append(f"{p} {q} : {nums}")
    return "\n".join(out) + "\n"
