# Golden values of the two-layered Green function by direct real-axis
# quadrature of its Fourier representation (mpmath, 30 digits).
# Output columns: k_plus,k_minus,x1,x2,y1,y2,re,im,tol
import mpmath as mp

mp.mp.dps = 30


def S(xi, a):
    if abs(xi) <= a:
        return -1j * mp.sqrt(a * a - xi * xi)
    return mp.sqrt(xi * xi - a * a)


def golden(kp, km, x, y):
    kp, km = mp.mpf(kp), mp.mpf(km)
    x1, x2, y1, y2 = map(mp.mpf, (*x, *y))
    d = x1 - y1
    above_x, above_y = x2 > 0, y2 > 0
    if above_x and above_y:
        amp = lambda sp, sm: (sp - sm) / ((sp + sm) * sp) / 2
        ex = lambda sp, sm: mp.exp(-sp * (x2 + y2))
        free = kp
    elif above_x:
        amp = lambda sp, sm: 1 / (sp + sm)
        ex = lambda sp, sm: mp.exp(sm * y2 - sp * x2)
        free = None
    elif above_y:
        amp = lambda sp, sm: 1 / (sp + sm)
        ex = lambda sp, sm: mp.exp(-sp * y2 + sm * x2)
        free = None
    else:
        amp = lambda sp, sm: (sm - sp) / ((sp + sm) * sm) / 2
        ex = lambda sp, sm: mp.exp(-sm * abs(x2 + y2))
        free = km

    def f(xi):
        sp, sm = S(xi, kp), S(xi, km)
        return amp(sp, sm) * ex(sp, sm) * mp.expj(xi * d)

    dep = (x2 + y2) if (above_x and above_y) else (-(x2 + y2) if not (above_x or above_y) else abs(x2) + abs(y2))
    kl, kh = min(kp, km), max(kp, km)
    L = kh + 50 / dep
    pts = [-L, -kh, -kl, 0, kl, kh, L]
    fine = []
    step = mp.pi / max(abs(d), 1)
    for a, b in zip(pts[:-1], pts[1:]):
        n = int(mp.ceil((b - a) / step))
        fine += [a + (b - a) * i / n for i in range(n)]
    fine.append(L)
    val = mp.quad(f, fine) / (2 * mp.pi)
    if free is not None:
        r = mp.sqrt((x1 - y1) ** 2 + (x2 - y2) ** 2)
        val += 1j / 4 * mp.hankel1(0, free * r)
    return val


cases = [
    (2.7, 3.5, (0, 0.5), (0, -0.5)),
    (2.7, 3.5, (0.3, -0.4), (-0.2, -0.9)),
    (2.7, 3.5, (1.0, 0.7), (-0.5, -1.2)),
    (2.7, 3.5, (-0.5, -1.2), (1.0, 0.7)),
    (2.7, 3.5, (0.2, 0.3), (-0.4, 0.6)),
    (2.7, 3.5, (0.0, -1.0), (2.5, -0.8)),
    (3.5, 2.7, (0, 0.5), (0, -0.5)),
    (3.5, 2.7, (0.6, 0.56), (1.0, -1.3)),
    (3.5, 2.7, (0.1, -0.8), (-0.3, -1.1)),
    (3.0, 4.0, (1.0, 0.3), (0.2, -1.0)),
    (4.0, 3.0, (0.0, -0.6), (0.05, -0.7)),
    (2.7, 3.5, (0.6, 0.56), (1.0, -1.3)),
]
print("k_plus,k_minus,x1,x2,y1,y2,re,im,tol")
for kp, km, x, y in cases:
    v = golden(kp, km, x, y)
    print(f"{kp},{km},{x[0]},{x[1]},{y[0]},{y[1]},{mp.nstr(v.real, 20)},{mp.nstr(v.imag, 20)},1e-11")
