package com.example;

import org.json.*;

public class WildcardImport {
    public int measure(String text) {
        JSONArray rows = new JSONArray(text); // use: org.json.JSONArray#<init>/1
        return rows.length(); // use: org.json.JSONArray#length/0
    }
}
