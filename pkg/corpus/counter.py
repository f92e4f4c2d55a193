class Counter:
    def __init__(self):
        self.count = 0

    def increment(self):
        self.count += 1
        return self.count


if __name__ == "__main__":
    c = Counter()
    c.increment()
    print(c.increment())
    print(c.count)
    c.count
