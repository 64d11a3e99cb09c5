def max_val(het_list):
    numbers = [item for item in het_list
               if isinstance(item, int)]
    return max(numbers)
