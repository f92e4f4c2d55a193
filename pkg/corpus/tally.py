calls = 0
SCALE = 10


def bump():
    global calls
    calls += 1
    return calls * SCALE


def histogram(words):
    counts = {}
    for i in range(len(words)):
        w = words[i]
        if w in counts:
            counts[w] = counts[w] + 1
        else:
            counts[w] = 1
    return counts


if __name__ == "__main__":
    print(bump())
    print(bump())
    print(histogram(["a", "b", "a", "c", "a"]))
    histogram(["x", "x"])
