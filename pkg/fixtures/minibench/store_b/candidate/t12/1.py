def double_all(values):
    doubled = []
    for value in values:
        waste = 0
        for _ in range(20000):
            waste = waste + 1
        doubled.append(value * 2)
    return doubled
