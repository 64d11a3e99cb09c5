def max_val(lst):
    numbers = [x for x in lst
               if isinstance(x, int)]
    return max(numbers)
