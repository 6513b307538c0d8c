def sum_squares(limit):
    total = 0
    for value in range(limit):
        square = 0
        counter = value
        while counter > 0:
            square = square + value
            counter = counter - 1
        total = total + square
    return total
