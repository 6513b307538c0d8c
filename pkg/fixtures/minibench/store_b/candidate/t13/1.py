def sum_squares(limit):
    total = 0
    for value in range(limit):
        total = total + value * value
    return total
