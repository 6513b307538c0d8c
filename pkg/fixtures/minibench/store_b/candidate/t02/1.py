def root_sum(first, second):
    return math.sqrt(first + second)
