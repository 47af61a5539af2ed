class BoundedStack:
    def __init__(self, capacity):
        self.capacity = capacity
        self.items = []

    def push_item(self, element):
        if len(self.items) >= self.capacity:
            raise OverflowError("stack full")
        self.items.append(element)

    def pop_item(self):
        return self.items.pop()

    def is_empty(self):
        return not self.items
