"""Random well-typed diagrams for property tests."""

from soficalc.tqft import CAP, CAP2, CUP, CUP2, Diagram, Gen, dot, ident, swap
from soficalc.words import LeftUP, RightUP, normalize_up

# endpoint word kinds per flavor, mirroring the evaluation rules
ENDPOINT = {
    "fsa": {("birth", "+"): None, ("death", "+"): None, ("birth", "-"): None,
            ("death", "-"): None},
    "sofic": {("birth", "+"): "L", ("death", "+"): "R", ("birth", "-"): "R",
              ("death", "-"): "L"},
    "buchi": {("birth", "+"): None, ("death", "+"): "R", ("birth", "-"): "R",
              ("death", "-"): None},
}
ENDPOINT["projective"] = ENDPOINT["buchi"]


def _word(rng, letters, lo, hi):
    return "".join(rng.choice(letters) for _ in range(rng.randint(lo, hi)))


def endpoint(rng, flavor, kind, sign, letters="ab"):
    w = ENDPOINT[flavor][(kind, sign)]
    if w == "L":
        word = normalize_up(LeftUP(_word(rng, letters, 1, 2), _word(rng, letters, 0, 2)))
    elif w == "R":
        word = normalize_up(RightUP(_word(rng, letters, 0, 2), _word(rng, letters, 1, 2)))
    else:
        word = None
    return Gen(kind, sign, word=word)


def random_slice(rng, flavor, boundary, max_width=3, letters="ab"):
    out, i = [], 0
    width = 0
    while i <= len(boundary):
        # optionally insert a generator with no inputs
        room = max_width - width - (len(boundary) - i)
        if room >= 2 and rng.random() < 0.25:
            out.append(rng.choice([CUP, CUP2]))
            width += 2
            continue
        if room >= 1 and rng.random() < 0.15:
            out.append(endpoint(rng, flavor, "birth", rng.choice("+-"), letters))
            width += 1
            continue
        if i == len(boundary):
            break
        s = boundary[i]
        r = rng.random()
        pair = tuple(boundary[i:i + 2])
        if len(pair) == 2 and r < 0.2:
            out.append(swap(*pair))
            i += 2
            width += 2
        elif pair == ("-", "+") and r < 0.35:
            out.append(CAP)
            i += 2
        elif pair == ("+", "-") and r < 0.35:
            out.append(CAP2)
            i += 2
        elif r < 0.45:
            out.append(endpoint(rng, flavor, "death", s, letters))
            i += 1
        elif r < 0.75:
            out.append(dot(rng.choice(letters), s))
            i += 1
            width += 1
        else:
            out.append(ident(s))
            i += 1
            width += 1
    return tuple(out)


def slice_output(sl):
    return tuple(s for g in sl for s in g.outputs)


def random_diagram(rng, flavor, source=(), slices=3, max_width=3, letters="ab"):
    cur = tuple(source)
    out = []
    for _ in range(slices):
        sl = random_slice(rng, flavor, cur, max_width, letters)
        if sl:
            out.append(sl)
            cur = slice_output(sl)
        elif cur == ():
            continue
    return Diagram(tuple(source), tuple(out))


def close_off(rng, flavor, d, letters="ab"):
    """Append slices that consume the target with caps and deaths."""
    cur = d.target
    slices = list(d.slices)
    while cur:
        sl, i = [], 0
        while i < len(cur):
            pair = tuple(cur[i:i + 2])
            if pair == ("-", "+"):
                sl.append(CAP)
                i += 2
            elif pair == ("+", "-"):
                sl.append(CAP2)
                i += 2
            else:
                sl.append(endpoint(rng, flavor, "death", cur[i], letters))
                i += 1
        slices.append(tuple(sl))
        cur = slice_output(sl)
    return Diagram(d.source, tuple(slices))


def random_closed(rng, flavor, slices=4, max_width=4, letters="ab"):
    return close_off(rng, flavor, random_diagram(rng, flavor, (), slices, max_width, letters),
                     letters)
