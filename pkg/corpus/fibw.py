# Fibonacci with a fixed amount of sine work per call.
import math

WORK = 200


def fibw(x):
    acc = 0.0
    for i in range(WORK):
        acc = acc + math.sin(i)
    if x in (1, 2):
        return 1
    return fibw(x - 1) + fibw(x - 2)


if __name__ == "__main__":
    print(fibw(8))
