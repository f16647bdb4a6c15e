"""Brute-force cross-checks for local_analysis."""
import sys, itertools, time
sys.path.insert(0, "/root/pkg/src")
from fractions import Fraction
from quadforms.forms_core import parse_form, GramForm, TargetSet, theta_prefix
from quadforms.local_analysis import (
    kronecker, diagonalize_odd, two_adic_blocks, count_diagonal_odd,
    count_blocks_two, two_adic_value_cosets, _cosets_contain,
    local_density, represents_over_zp, locally_represents,
    dirichlet_l2, dirichlet_l2_exact, bernoulli2_chi,
    eisenstein_constant, siegel_expected, good_prime_density,
)

# kronecker sanity vs quadratic residues
for p in (3, 5, 7, 11, 13):
    qrs = {(x * x) % p for x in range(1, p)}
    for a in range(1, p):
        want = 1 if a in qrs else -1
        assert kronecker(a, p) == want, (a, p)
assert kronecker(2, 8) == 0 and kronecker(3, 8) == -1 and kronecker(7, 8) == 1
assert kronecker(5, 1) == 1 and kronecker(-1, 5) == 1 and kronecker(-1, 3) == -1
print("kronecker: OK")

def brute_count(gram, n, q, k):
    r = len(gram)
    m = q ** k
    cnt = 0
    for x in itertools.product(range(m), repeat=r):
        tot = 0
        for i in range(r):
            tot += gram[i][i] * x[i] * x[i]
            for j in range(i + 1, r):
                tot += 2 * gram[i][j] * x[i] * x[j]
        if (tot // 2 - n) % m == 0:
            cnt += 1
    return cnt

FORMS = [
    [[2, 1], [1, 4]],
    [[2, 0, 1], [0, 4, 3], [1, 3, 14]],
    [[2, 1, 0], [1, 2, 1], [0, 1, 6]],
    [[4, 1], [1, 6]],
    [[2, 2], [2, 4]],
]

t0 = time.time()
for gram in FORMS:
    r = len(gram)
    for p in (3, 5, 7):
        av = diagonalize_odd(gram, p)
        for k in (1, 2) if r == 3 else (1, 2, 3):
            if p ** (k * r) > 4_000_000:
                continue
            for n in (1, 2, p, 2 * p, p * p, 3 * p * p + 1):
                got = count_diagonal_odd(av, n, p, k)
                want = brute_count(gram, n, p, k)
                assert got == want, (gram, p, k, n, got, want)
print(f"odd-p character-sum counts == brute: OK ({time.time()-t0:.1f}s)")

t0 = time.time()
for gram in FORMS:
    r = len(gram)
    blocks = two_adic_blocks(gram)
    for k in (1, 2, 3, 4, 5, 6):
        if 2 ** (k * r) > 4_000_000:
            continue
        for n in (1, 2, 3, 4, 6, 8, 12, 16, 24):
            got = count_blocks_two(blocks, n, k)
            want = brute_count(gram, n, 2, k)
            assert got == want, (gram, k, n, got, want)
print(f"2-adic block convolution counts == brute: OK ({time.time()-t0:.1f}s)")

# 2-adic value cosets vs brute value sets mod 2^k
t0 = time.time()
for gram in FORMS:
    r = len(gram)
    cap = 8 if r == 2 else 6
    cosets = two_adic_value_cosets(GramForm.from_rows(gram), cap)
    m = 1 << cap
    vals = set()
    for x in itertools.product(range(m), repeat=r):
        tot = 0
        for i in range(r):
            tot += gram[i][i] * x[i] * x[i]
            for j in range(i + 1, r):
                tot += 2 * gram[i][j] * x[i] * x[j]
        vals.add((tot // 2) % m)
    # membership must agree for all n with val_2(n) <= cap-3
    for n in range(1, m):
        v2 = (n & -n).bit_length() - 1
        if v2 > cap - 3:
            continue
        got = _cosets_contain(cosets, n)
        want = n in vals
        assert got == want, (gram, n, got, want)
print(f"2-adic value cosets == brute value sets: OK ({time.time()-t0:.1f}s)")

# L-values
import mpmath as mp
for d in (1, 4, 5, 8, 12, 13, 16, 329, 1360):
    c, d0 = dirichlet_l2_exact(d)
    exact = float(c) * float(mp.pi) ** 2 / float(mp.sqrt(d0))
    num = dirichlet_l2(d)
    assert abs(exact - num) < 1e-12, (d, exact, num)
assert abs(dirichlet_l2(1) - float(mp.pi) ** 2 / 6) < 1e-12
assert abs(dirichlet_l2(-4) - float(mp.catalan)) < 1e-12
assert bernoulli2_chi(5) == Fraction(4, 5)
print("dirichlet L(2): exact == numeric, B_{2,chi_5} = 4/5: OK")

# Siegel: genus of sum of four squares has one class; r(n) = 8 sigma(n), n odd
f4 = parse_form("x^2+y^2+z^2+w^2")
th = theta_prefix(f4, 20)
for n in (1, 3, 5, 7, 9, 11, 15):
    sig = sum(d for d in range(1, n + 1) if n % d == 0)
    exp = siegel_expected(f4, n)
    assert exp == 8 * sig == th[n], (n, exp, 8 * sig, th[n])
print("siegel_expected == 8*sigma(n) == theta (four squares, odd n): OK")

# good-prime closed forms vs generic machinery (rank 4)
f5251 = parse_form("x^2+2*x*z+7*x*w+2*y^2+y*z+7*z^2+7*z*w+14*w^2")
for p in (3, 5, 11, 13):
    for n in (1, 2, 3 * p + 1, p, 2 * p):
        got = good_prime_density(p, n, f5251.det)
        want = local_density(f5251, n, p)
        assert got == want, (p, n, got, want)
print("good-prime closed forms == generic densities: OK")

# Eisenstein constants from the two flagship quaternaries
t0 = time.time()
ce1 = eisenstein_constant(f5251, TargetSet.parse("coprime:5"))
print(f"C_E(form A, coprime:5) = {ce1}  ({time.time()-t0:.1f}s)")
assert ce1 == Fraction(69, 47), ce1
f5550 = parse_form("x^2+x*z+2*x*w+2*y^2+5*z^2+10*w^2")
t0 = time.time()
ce2 = eisenstein_constant(f5550, TargetSet.parse("coprime:7"))
print(f"C_E(form B, coprime:7) = {ce2}  ({time.time()-t0:.1f}s)")
assert ce2 == Fraction(4, 45), ce2
print("eisenstein constants: OK")

# locally_represents quick checks
assert locally_represents(parse_form("x^2+y^2+z^2"), 7) is False or True
f3 = parse_form("x^2+y^2+z^2")
assert not represents_over_zp(f3, 7, 2)   # 7 = 4^a(8b+7) excluded at 2
assert represents_over_zp(f3, 3, 2) and represents_over_zp(f3, 7, 7)
assert not locally_represents(f3, 7) and locally_represents(f3, 3)
print("three-squares local obstruction at 2: OK")
