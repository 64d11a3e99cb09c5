def max_val(het_list):
    max_value = float('-inf')
    for item in het_list:
        if (isinstance(item, int) or (isinstance(item, str)
                and item.isdigit())):
            num = int(item)
            max_value = num if num > max_value else max_value
    return max_value
