LIMIT = 3

if __name__ == "__main__":
    i = 0
    total = 0
    while i < LIMIT:
        total = total + i * i
        i += 1
    print("sum of squares", total)
    total
