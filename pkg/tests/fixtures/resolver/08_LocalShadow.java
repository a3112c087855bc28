package com.example;

// depends: no

public class LocalShadow {
    static class JSONObject {
        void grow() {
        }
    }

    public void exercise() {
        JSONObject own = new JSONObject();
        own.grow();
    }
}
