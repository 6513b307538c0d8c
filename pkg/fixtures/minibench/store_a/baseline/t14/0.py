def tail_item(count):
    return count - 1
