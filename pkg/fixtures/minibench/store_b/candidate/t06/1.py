def is_positive(number):
    if number > 0:
        return True
    return False
