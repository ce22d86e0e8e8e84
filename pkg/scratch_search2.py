"""Expanded staged search for the quadruple update rule. Not shipped."""
import itertools
import numpy as np

rng = np.random.default_rng(11)

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

def apply_word(rule, coords, word, m):
    a = [0] * m
    b = [0] * m
    for j in range(1, m - 1):
        a[j], b[j] = coords[2 * (j - 1)], coords[2 * (j - 1) + 1]
    for i in word:
        a[i - 1], b[i - 1], a[i], b[i] = rule(a[i - 1], b[i - 1], a[i], b[i])
        a[0] = b[0] = a[m - 1] = b[m - 1] = 0
    out = []
    for j in range(1, m - 1):
        out.extend((a[j], b[j]))
    return tuple(out)

vec_quick = [tuple(int(x) for x in rng.integers(-7, 8, 6)) for _ in range(2)]
vecs5 = [tuple(int(x) for x in rng.integers(-9, 10, 6)) for _ in range(12)]
vecs6 = [tuple(int(x) for x in rng.integers(-9, 10, 8)) for _ in range(8)]

signs = (1, -1)
fs = ("p", "n")

space = itertools.product(
    signs, fs, signs, fs,
    signs, fs, signs,
    signs, fs, signs,
    signs, fs, signs, fs, signs, fs, signs, (2, 1),
    signs, fs, signs, fs, signs, fs, signs, (1, 2),
)

count = 0
stage1 = []
for v in space:
    count += 1
    rule = make_rule(v)
    ok = True
    for L in vec_quick:
        if apply_word(rule, L, [2, 3, 2], 5) != apply_word(rule, L, [3, 2, 3], 5):
            ok = False
            break
    if ok:
        stage1.append(v)
print("total:", count, "stage1 survivors:", len(stage1))

stage2 = []
for v in stage1:
    rule = make_rule(v)
    ok = True
    for L in vecs5:
        if apply_word(rule, L, [2, 3, 2], 5) != apply_word(rule, L, [3, 2, 3], 5):
            ok = False
            break
    if not ok:
        continue
    for L in vecs6:
        if apply_word(rule, L, [2, 3, 2], 6) != apply_word(rule, L, [3, 2, 3], 6):
            ok = False
            break
        if apply_word(rule, L, [3, 4, 3], 6) != apply_word(rule, L, [4, 3, 4], 6):
            ok = False
            break
        if apply_word(rule, L, [2, 4], 6) != apply_word(rule, L, [4, 2], 6):
            ok = False
            break
    if not ok:
        continue
    moved = any(apply_word(rule, L, [2], 5) != L for L in vecs5)
    if not moved:
        continue
    imgs = set(apply_word(rule, L, [2], 5) for L in vecs5)
    if len(imgs) != len(set(vecs5)):
        continue
    stage2.append(v)

print("stage2 survivors:", len(stage2))
np.save("/tmp/rule_survivors.npy", np.array(stage2, dtype=object), allow_pickle=True)
for v in stage2[:30]:
    print(v)
