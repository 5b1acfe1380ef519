method Area(w: int, h: int) returns (a: int)
  ensures a == w * h
{
  return w * h;
}
