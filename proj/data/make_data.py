"""Writes the worked-example and figure instances in this directory."""
import itertools
import json
import pathlib

HERE = pathlib.Path(__file__).parent


def table(size, arity, f):
    return [f(*args) for args in itertools.product(range(size), repeat=arity)]


def closed(rel, f, width):
    rel = set(rel)
    for ts in itertools.product(rel, repeat=3):
        if tuple(f(*(t[k] for t in ts)) for k in range(width)) not in rel:
            return False
    return True


def invariant(size, f, width):
    cells = list(itertools.product(range(size), repeat=width))
    out = []
    for mask in range(1, 1 << len(cells)):
        rel = [c for k, c in enumerate(cells) if mask >> k & 1]
        if closed(rel, f, width):
            out.append(sorted(rel))
    out.sort(key=lambda r: (len(r), r))
    return out


def majority(x, y, z):
    if x == y or x == z:
        return x
    if y == z:
        return y
    return x


def write(name, doc):
    lines = ["{"]
    items = list(doc.items())
    for k, (key, value) in enumerate(items):
        comma = "," if k + 1 < len(items) else ""
        if key == "edges":
            lines.append(f'  "edges": [')
            for e, edge in enumerate(value):
                sep = "," if e + 1 < len(value) else ""
                lines.append("    " + json.dumps(edge) + sep)
            lines.append("  ]" + comma)
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(value)}{comma}")
    lines.append("}")
    (HERE / name).write_text("\n".join(lines) + "\n")


z2 = lambda x, y, z: (x + y + z) % 2
z2_wnu = {"arity": 3, "table": table(2, 3, z2)}

write("example1.json", {
    "base_size": 2,
    "element_names": ["a", "b"],
    "wnu": z2_wnu,
    "unary": [[a for (a,) in r] for r in invariant(2, z2, 1)],
    "binary": invariant(2, z2, 2),
    "n": 3,
    "domains": [["a", "b"]] * 3,
    "edges": [
        {"from": 0, "to": 1, "tuples": [["a", "b"]]},
        {"from": 1, "to": 2, "tuples": [["a", "b"]]},
    ],
})

write("example2.json", {
    "base_size": 2,
    "element_names": ["a", "b"],
    "wnu": z2_wnu,
    "n": 3,
    "domains": [["a", "b"]] * 3,
    "edges": [
        {"from": 0, "to": 1, "tuples": [["a", "b"], ["b", "a"]]},
        {"from": 1, "to": 2, "tuples": [["a", "b"], ["b", "a"]]},
    ],
})

write("z2_linear.json", {
    "base_size": 2,
    "element_names": ["a", "b"],
    "wnu": z2_wnu,
    "n": 0,
})

maj = {"arity": 3, "table": table(4, 3, majority)}
fig_domains = [["a", "b"], ["a", "c"], ["d", "b"]]


def figure(e01, e21, e20):
    return {
        "base_size": 4,
        "element_names": ["a", "b", "c", "d"],
        "wnu": maj,
        "n": 3,
        "domains": fig_domains,
        "edges": [
            {"from": 0, "to": 1, "tuples": e01},
            {"from": 2, "to": 1, "tuples": e21},
            {"from": 2, "to": 0, "tuples": e20},
        ],
    }


write("fig1.json", figure([["a", "a"], ["b", "c"]], [["d", "a"], ["b", "c"]], [["d", "a"], ["b", "b"]]))
write("fig1_linked.json",
      figure([["a", "a"], ["b", "c"]], [["d", "a"], ["b", "c"], ["d", "c"]], [["d", "a"], ["b", "b"]]))
write("fig2.json", figure([["a", "c"], ["b", "a"]], [["d", "a"], ["b", "c"]], [["d", "a"], ["b", "b"]]))

# Figure 3: ternary min under d < a < e < b < c.
names3 = ["a", "b", "e", "c", "d"]
rank = {"d": 0, "a": 1, "e": 2, "b": 3, "c": 4}
by_rank = sorted(range(5), key=lambda k: rank[names3[k]])
meet = lambda x, y, z: min((x, y, z), key=lambda k: rank[names3[k]])
idx = {n: k for k, n in enumerate(names3)}
e01 = [["a", "a"], ["e", "e"], ["b", "c"]]
e21 = [["d", "a"], ["b", "c"], ["d", "e"]]
e20 = [["d", "a"], ["b", "b"], ["d", "e"]]
domains3 = [["a", "b", "e"], ["a", "c", "e"], ["d", "b"]]
unary3 = sorted({tuple(sorted(idx[x] for x in d)) for d in domains3} | {(k,) for k in range(5)} | {tuple(range(5))},
                key=lambda r: (len(r), r))
binary3 = [sorted((idx[a], idx[b]) for a, b in rel) for rel in (e01, e21, e20)]
binary3.append(sorted((k, k) for k in range(5)))
binary3.append(sorted(itertools.product(range(5), repeat=2)))
for rel in binary3:
    assert closed(rel, meet, 2), rel
binary3.sort(key=lambda r: (len(r), r))
write("fig3.json", {
    "base_size": 5,
    "element_names": names3,
    "wnu": {"arity": 3, "table": table(5, 3, meet)},
    "unary": [list(r) for r in unary3],
    "binary": binary3,
    "n": 3,
    "domains": domains3,
    "edges": [
        {"from": 0, "to": 1, "tuples": e01},
        {"from": 2, "to": 1, "tuples": e21},
        {"from": 2, "to": 0, "tuples": e20},
    ],
})
