"""Stage 4 diagnostics: pairwise inverses among survivors; boundary behavior."""
import numpy as np

rng = np.random.default_rng(31)

def pos(x): return x if x > 0 else 0
def neg(x): return x if x < 0 else 0
F = {"p": pos, "n": neg}

def make_rule(v):
    (ca, fa, cb, fb,
     b1s, b1f, b1t,
     b2s, b2f, b2t,
     a1s1, a1f1, a1s2, a1f2, a1is, a1if, a1tc, a1x,
     a2s1, a2f1, a2s2, a2f2, a2is, a2if, a2tc, a2x) = v
    def rule(a1, b1, a2, b2):
        c = a1 - a2 + ca * F[fa](b1) + cb * F[fb](b2)
        nb1 = b2 + b1s * F[b1f](b1t * c)
        nb2 = b1 + b2s * F[b2f](b2t * c)
        i1 = b2 if a1x == 2 else b1
        i2 = b1 if a2x == 1 else b2
        na1 = a1 + a1s1 * F[a1f1](b1) + a1s2 * F[a1f2](a1is * F[a1if](i1) + a1tc * c)
        na2 = a2 + a2s1 * F[a2f1](b2) + a2s2 * F[a2f2](a2is * F[a2if](i2) + a2tc * c)
        return na1, nb1, na2, nb2
    return rule

survivors = [tuple(v) for v in np.load("/tmp/rule_survivors.npy", allow_pickle=True)]
rules = [make_rule(v) for v in survivors]
quads = [tuple(int(x) for x in rng.integers(-9, 10, 4)) for _ in range(40)]

inv_pairs = []
for i, r1 in enumerate(rules):
    for j, r2 in enumerate(rules):
        if all(r2(*r1(*q)) == q for q in quads) and all(r1(*r2(*q)) == q for q in quads):
            inv_pairs.append((i, j))
print("mutually inverse pairs:", len(inv_pairs))

# For inverse pairs: test boundary relations with zero padding (m=3: sigma_1 sigma_2)
def apply_word(posrule, invrule, coords, word, m):
    a = [0] * m
    b = [0] * m
    for j in range(1, m - 1):
        a[j], b[j] = coords[2 * (j - 1)], coords[2 * (j - 1) + 1]
    for s in word:
        i = abs(s)
        r = posrule if s > 0 else invrule
        a[i - 1], b[i - 1], a[i], b[i] = r(a[i - 1], b[i - 1], a[i], b[i])
        a[0] = b[0] = a[m - 1] = b[m - 1] = 0
    out = []
    for j in range(1, m - 1):
        out.extend((a[j], b[j]))
    return tuple(out)

vecs = {m: [tuple(int(x) for x in rng.integers(-9, 10, 2 * m - 4)) for _ in range(24)]
        for m in (3, 4, 5)}

full_good = []
for (i, j) in inv_pairs:
    rule, inv = rules[i], rules[j]
    ok = True
    for m in (3, 4, 5):
        for g in range(1, m - 1):
            for L in vecs[m]:
                if apply_word(rule, inv, L, [g, g + 1, g], m) != apply_word(rule, inv, L, [g + 1, g, g + 1], m):
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            break
    # cancellation with padding at boundary generators
    if ok:
        for m in (3, 4, 5):
            for g in range(1, m):
                for L in vecs[m]:
                    if apply_word(rule, inv, L, [g, -g], m) != L or apply_word(rule, inv, L, [-g, g], m) != L:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
    if ok:
        full_good.append((i, j))

print("inverse pairs passing all relations with zero padding:", len(full_good))
np.save("/tmp/rule_pairs.npy", np.array([(survivors[i], survivors[j]) for i, j in full_good], dtype=object), allow_pickle=True)
for i, j in full_good[:10]:
    print("POS:", survivors[i])
    print("INV:", survivors[j])
    print()
