# Half-wave maps numerical laboratory
