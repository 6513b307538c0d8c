def tail_item(count):
    numbers = []
    for value in range(count):
        numbers.append(value)
    return numbers[-1]
