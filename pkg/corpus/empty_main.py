def unused(x):
    return x * 2


if __name__ == "__main__":
    pass
