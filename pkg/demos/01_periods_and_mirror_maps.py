"""Local period data and mirror maps at the four special points.

Walks through the genus-0 layer: Frobenius bases of the order-4 operator,
the q-expansions of the mirror maps on both large-volume sides, the quantum
Yukawa couplings, and the resulting degree-by-degree invariants.
"""

from mirrorgv import CYModel, build_frame, genus0_gw, genus1_gw, gw_to_gv, quantum_yukawa

model = CYModel.builtin()
ORDER = 14

print("== operator data ==")
print("theta^4 coefficient:", model.operator.coeffs[4])
print("Yukawa coupling C_xxx:", model.yukawa)
print()

for key, label in (("x", "Grassmannian side (x = 0)"), ("z", "Pfaffian side (z = 0)")):
    frame = build_frame(model, key, ORDER)
    print(f"== {label} ==")
    print("fundamental period w0:", frame.w0)
    inv = frame.coord.inverse()
    coeffs = [str(inv.coefficient(k)) for k in range(-1, 5)]
    print("1/coordinate as a function of the flat parameter:", " , ".join(coeffs))
    K = quantum_yukawa(model, frame)
    print("quantum Yukawa:", [str(K.coefficient(k)) for k in range(6)])
    N0 = genus0_gw(model, frame, 8)
    N1 = genus1_gw(model, frame, 8)
    table = {(0, d): v for d, v in N0.items()} | {(1, d): v for d, v in N1.items()}
    n = gw_to_gv(table, 1, 8)
    print("n_0(d), d=1..8:", [n[(0, d)] for d in range(1, 9)])
    print("n_1(d), d=1..8:", [n[(1, d)] for d in range(1, 9)])
    print()

print("== conifold (all three discriminant roots at once) ==")
frame = build_frame(model, "conifold", 10)
print("field:", frame.field)
print("vanishing-cycle period w1:", frame.basis.solutions[1].parts[0])
print()
print("== apparent point x = 3 ==")
frame = build_frame(model, "x3", 10)
print("w0:", frame.w0)
print("flat coordinate series s(U):", frame.coord)
