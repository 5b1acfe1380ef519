method Perimeter(w: int, h: int) returns (p: int)
  ensures p == w + w + h + h
{
  return 2 * (w + h);
}
