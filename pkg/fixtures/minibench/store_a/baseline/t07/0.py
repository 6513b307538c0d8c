def count_items(items):
    count = 0
    for entry in items:
        count = count + 1
    return count
