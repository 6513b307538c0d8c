def median_of(values):
    # order the sample first
    ordered = sorted(values)

    middle = len(ordered) // 2
    if len(ordered) % 2 == 1:
        return ordered[middle]

    # even length: average the central pair
    return (ordered[middle - 1] + ordered[middle]) / 2
