"""Stage 3: filter the 128 interior-rule survivors. Not shipped."""
import numpy as np

rng = np.random.default_rng(23)

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

def conj_rule(rule, mode):
    """Inverse candidate via mirror conjugation."""
    if mode == "a":
        def inv(a1, b1, a2, b2):
            x1, y1, x2, y2 = rule(-a1, b1, -a2, b2)
            return -x1, y1, -x2, y2
    else:
        def inv(a1, b1, a2, b2):
            x1, y1, x2, y2 = rule(a1, -b1, a2, -b2)
            return x1, -y1, x2, -y2
    return inv

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

survivors = list(np.load("/tmp/rule_survivors.npy", allow_pickle=True))
print("loaded", len(survivors))

vecs = {m: [tuple(int(x) for x in rng.integers(-9, 10, 2 * m - 4)) for _ in range(30)]
        for m in (3, 4, 5, 6)}

good = []
for v in survivors:
    v = tuple(v)
    rule = make_rule(v)
    for mode in ("a", "b"):
        inv = conj_rule(rule, mode)
        ok = True
        # sigma sigma^-1 = id, all generators incl. boundary, all m
        for m in (3, 4, 5):
            for i in range(1, m):
                for L in vecs[m][:12]:
                    if apply_word(rule, inv, L, [i, -i], m) != L:
                        ok = False
                        break
                    if apply_word(rule, inv, L, [-i, i], m) != L:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if not ok:
            continue
        # braid relation incl. boundary generators
        for m in (3, 4, 5):
            for i in range(1, m - 1):
                for L in vecs[m][:12]:
                    if apply_word(rule, inv, L, [i, i + 1, i], m) != apply_word(rule, inv, L, [i + 1, i, i + 1], m):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            good.append((v, mode))

print("with inverse + boundary relations:", len(good))
np.save("/tmp/rule_good.npy", np.array(good, dtype=object), allow_pickle=True)
for g in good[:20]:
    print(g)
