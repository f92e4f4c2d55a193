import math

PI_ISH = 3.14159


def circle_area(r):
    return PI_ISH * r * r


def wave(n):
    total = 0.0
    for i in range(n):
        total = total + math.sin(i)
    print("wave", n, round_to(total, 6))
    return total


def round_to(x, digits):
    scale = 10 ** digits
    return int(x * scale) / scale
