# Two classes where one creates and drives the other.
class Book:
    def __init__(self, title, pages):
        self.title = title
        self.pages = pages
        self.read = 0

    def read_pages(self, n):
        left = self.pages - self.read
        if n > left:
            n = left
        self.read = self.read + n
        return self.read == self.pages


class Shelf:
    def __init__(self, name):
        self.name = name
        self.titles = []

    def add(self, title):
        self.titles = self.titles + [title]
        return len(self.titles)


def read_all(title, pages, chunk):
    book = Book(title, pages)
    rounds = 0
    done = False
    while not done:
        done = book.read_pages(chunk)
        rounds += 1
    print("finished", book.title, "in", rounds, "rounds")
    return rounds


if __name__ == "__main__":
    s = Shelf("fiction")
    s.add("dune")
    s.add("emma")
    print(s.name, s.titles)
    print(read_all("dune", 10, 3))
    b = Book("emma", 5)
    b.read_pages(2)
    print(b.read, b.read_pages(9), b.read)
    s.titles
