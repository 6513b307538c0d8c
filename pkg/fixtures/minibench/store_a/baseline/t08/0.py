def describe_range(low, high):
    return "values from " + str(low) + " to " + str(high)
