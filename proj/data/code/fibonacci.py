def fibonacci(limit):
    previous, current = 0, 1
    series = []
    while previous < limit:
        series.append(previous)
        previous, current = current, previous + current
    return series


def even_terms(series):
    return [value for value in series if value % 2 == 0]
