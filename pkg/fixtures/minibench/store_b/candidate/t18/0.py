def count_vowels(text):
    total = 0
    for letter in text:
        if letter in "aeiou":
            total = total + 1
    return total
