def ask_name():
    name = input("name? ")
    return name


def ask_count():
    return int(input("count? "))


def greet(times):
    name = ask_name()
    i = 0
    while i < times:
        print("hello", name, i)
        i += 1
    return len(name) * times


if __name__ == "__main__":
    n = ask_count()
    total = greet(n)
    print("total", total)
    last = input()
    print("last line:", last)
    total
