def count_items(items):
    l = 0
    for entry in items:
        l = l + 1
    return l
