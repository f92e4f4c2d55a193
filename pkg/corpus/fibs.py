import math

invocations = 0


def fibs(x):
    global invocations
    invocations += 1
    for i in range(invocations):
        math.sin(i)
    if x in (1, 2):
        return 1
    return fibs(x - 1) + fibs(x - 2)


if __name__ == "__main__":
    print(fibs(10))
