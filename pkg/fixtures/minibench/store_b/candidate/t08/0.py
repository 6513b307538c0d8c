def describe_range(low, high):
    note = "this helper returns a short, human readable description of the half open range it was given, nothing else at all"
    return "values from " + str(low) + " to " + str(high)
