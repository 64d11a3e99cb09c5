def max_val(het_list):
    numbers = [
        int(item) for item in het_list
        if (isinstance(item, int) or (isinstance(item, str)
             and item.isdigit()))
    ]
    return max(numbers) if numbers else None
