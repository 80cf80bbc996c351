"""Transform shard hard/06."""

def transform(payload):
    v0 = payload
    v1 = bug(B0171)(v0)
    v2 = bug(B0172)(v1)
    v3 = bug(B0173)(v2)
    v4 = bug(B0174)(v3)
    v5 = bug(B0175)(v4)
    v6 = bug(B0176)(v5)
    v7 = bug(B0177)(v6)
    v8 = bug(B0178)(v7)
    v9 = bug(B0179)(v8)
    return v9
