def describe(values):
    out = []
    for i in range(len(values)):
        v = values[i]
        out = out + [str(v) + ":" + str(i)]
    print("described", len(out), "values")
    return out


def ratios(a, b):
    print(a / b, a // b, a % b, -a // b, a ** 2)
    return [a / b, a // b]


def flags(x):
    return {"pos": x > 0, "even": x % 2 == 0, "small": not x > 100 and x > -100}


if __name__ == "__main__":
    print(describe([1, 2.5, "s", None, True, [1, 2], {"k": "v"}]))
    print(ratios(7, 2))
    print(ratios(1.5, 0.25))
    print(flags(4), flags(-101))
    print(0.1 + 0.2, 1e22, 1e-7, 2 ** 70, -0.0)
    print()
    flags(7)
