class Account:
    def __init__(self, owner, balance):
        self.owner = owner
        self.balance = balance
        self.history = []

    def deposit(self, amount):
        self.balance = self.balance + amount
        self.record("deposit", amount)
        return self.balance

    def withdraw(self, amount):
        if amount > self.balance:
            print("refused:", self.owner, "wants", amount)
            return False
        self.balance = self.balance - amount
        self.record("withdraw", amount)
        return True

    def record(self, kind, amount):
        self.history = self.history + [[kind, amount]]

    def summary(self):
        return {"owner": self.owner, "balance": self.balance, "moves": len(self.history)}


def open_and_fund(owner, amount):
    acct = Account(owner, 0)
    acct.deposit(amount)
    return acct.summary()


if __name__ == "__main__":
    a = Account("ada", 10)
    a.deposit(5)
    a.withdraw(100)
    a.withdraw(3)
    print(a.balance, a.history)
    print(open_and_fund("bob", 42))
    a.summary()
